"""``songprint`` command-line front end.

Exit codes: 0 success, 1 partial failure, 2 usage or input error,
3 computation error.
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict
import logging
from pathlib import Path
import sys

from . import __version__
from .audio_io import read_wav
from .classifiers import TECHNIQUES, make_technique, save_model
from .config import PipelineConfig, config_reference
from .dtw_detect import threshold_sweep
from .errors import ConfigError, SingleClassDataset, SongprintError
from .evaluation import KINDS, EvalReport, format_table, run_experiment, write_table
from .features import LABELS, build_filterbank, extract_fingerprint, write_fingerprints
from .fixtures import write_corpus
from .sampling import LabeledDataset, make_extended_datasets, save_replicates

log = logging.getLogger("songprint")

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3
USUAL_RATE = 44100


class UsageError(Exception):
    pass


def load_config(args):
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects section.key=value, got {item!r}")
        cfg = cfg.override(key.strip(), value.strip())
    return cfg


def load_dataset(path):
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"dataset {path} does not exist")
    try:
        return LabeledDataset.from_csv(path)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


# -- extract -----------------------------------------------------------------

def read_label_map(path):
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"label map {path} does not exist")
    labels = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            label = (row.get("label") or "").strip()
            if label and label not in LABELS:
                raise UsageError(f"{path}: label {label!r} for {row.get('file')!r} is not MGB or Other")
            labels[row["file"].strip()] = label or None
    return labels


def _label_for(rel, labels):
    if labels is not None:
        if rel.as_posix() in labels:
            return labels[rel.as_posix()]
        if rel.name in labels:
            return labels[rel.name]
        return None
    parent = rel.parent.name
    return parent if parent in LABELS else None


def _extract_one(job):
    path, rel, label, cfg = job
    clip = read_wav(path)
    clip = type(clip)(clip.samples, clip.sample_rate, rel)
    bank = build_filterbank(clip.sample_rate, cfg.fft_size, cfg.n_filters, cfg.f_min, cfg.f_max)
    return extract_fingerprint(clip, cfg, label, bank), clip.sample_rate


def cmd_extract(args):
    cfg = load_config(args)
    root = Path(args.input_dir)
    if not root.is_dir():
        raise UsageError(f"input directory {root} is not readable")
    labels = read_label_map(args.labels) if args.labels else None
    files = sorted((p for p in root.rglob("*") if p.suffix.lower() == ".wav" and p.is_file()),
                   key=lambda p: p.relative_to(root).as_posix())
    jobs = [(p, p.relative_to(root).as_posix(), _label_for(p.relative_to(root), labels), cfg.mfcc)
            for p in files]
    if not jobs:
        log.warning("no .wav files under %s; writing header only", root)

    results = []
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_extract_one, j) for j in jobs]
            for j, fut in zip(jobs, futures):
                results.append((j, _outcome(fut.result)))
    else:
        for j in jobs:
            results.append((j, _outcome(lambda j=j: _extract_one(j))))

    fingerprints, failed = [], []
    for (path, rel, _, _), (value, err) in results:
        if err is not None:
            log.error("%s: %s", rel, err)
            failed.append(rel)
            continue
        fp, rate = value
        if rate != USUAL_RATE:
            log.warning("%s: sample rate %d Hz differs from the usual 44100 Hz", rel, rate)
        fingerprints.append(fp)
    write_fingerprints(fingerprints, args.output)
    counts = {lab: sum(fp.label == lab for fp in fingerprints) for lab in LABELS}
    unlabeled = sum(fp.label is None for fp in fingerprints)
    print(f"wrote {len(fingerprints)} fingerprints to {args.output} "
          f"(MGB={counts['MGB']}, Other={counts['Other']}, unlabeled={unlabeled})")
    if failed:
        print(f"{len(failed)} file(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _outcome(fn):
    try:
        return fn(), None
    except (SongprintError, ValueError, OSError) as exc:
        return None, exc


# -- smote -------------------------------------------------------------------

def cmd_smote(args):
    cfg = load_config(args)
    data = load_dataset(args.dataset)
    try:
        data.require_both_classes()
    except SingleClassDataset as exc:
        raise UsageError(str(exc)) from None
    reps = make_extended_datasets(data, cfg.smote.replicates, cfg.smote.base_seed,
                                  cfg.smote.k_neighbors)
    save_replicates(reps, args.output, cfg.smote.base_seed, cfg.smote.k_neighbors,
                    source=Path(args.dataset).name)
    c = reps[0].counts()
    print(f"wrote {len(reps)} extended datasets to {args.output} "
          f"(each MGB={c['MGB']}, Other={c['Other']})")
    return EXIT_OK


# -- sweep -------------------------------------------------------------------

def cmd_sweep(args):
    cfg = load_config(args)
    data = load_dataset(args.dataset)
    try:
        report = threshold_sweep(data, holdout_reference=cfg.sweep.holdout_reference,
                                 grid_size=cfg.sweep.grid_size)
    except SingleClassDataset as exc:
        raise UsageError(f"{args.dataset}: {exc}") from None
    out = Path(args.output)
    report.to_csv(out.with_suffix(".csv"))
    report.to_json(out.with_suffix(".json"), config=cfg.to_dict())
    band = report.optimal_band
    if band is None:
        print("no threshold reaches TP = TN = 1")
    else:
        print(f"optimal band: beta in [{band[0]:.4f}, {band[1]:.4f}]")
    return EXIT_OK


# -- experiment --------------------------------------------------------------

def technique_from_config(name, cfg):
    section = getattr(cfg, name, None)
    return make_technique(name, **(asdict(section) if section is not None else {}))


def cmd_experiment(args):
    cfg = load_config(args)
    data = load_dataset(args.dataset)
    technique = technique_from_config(args.technique, cfg)
    ex = cfg.experiment
    try:
        data.require_both_classes()
    except SingleClassDataset as exc:
        raise UsageError(f"{args.dataset}: {exc}") from None
    try:
        report = run_experiment(data, technique, args.kind, ex.repeats, ex.base_seed,
                                cfg.smote.k_neighbors, ex.smote_inside_folds, args.jobs,
                                config=cfg.to_dict())
        model = technique.fit(data, ex.base_seed) if (args.save_model or args.render_tree) else None
    except SongprintError as exc:
        log.error("experiment failed: %s", exc)
        return EXIT_COMPUTE
    out = Path(args.output)
    write_table([report], out.with_suffix(".csv"))
    report.to_json(out.with_suffix(".json"))
    if args.save_model:
        save_model(model, args.save_model)
    if args.render_tree:
        if not hasattr(model, "render"):
            raise UsageError("--render-tree only applies to the c45 technique")
        Path(args.render_tree).write_text(model.render(), encoding="utf-8")
    print(format_table([report]))
    return EXIT_OK


# -- fixtures / report / config ----------------------------------------------

def cmd_fixtures(args):
    out = Path(args.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"cannot write to {out}: {exc}") from None
    songs = write_corpus(out, args.seed, args.duration)
    print(f"wrote {len(songs)} WAV files and labels.csv to {out}")
    return EXIT_OK


def cmd_report(args):
    reports = []
    for p in args.reports:
        try:
            reports.append(EvalReport.from_json(p))
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"{p}: not an evaluation report ({exc})") from None
    if args.output:
        write_table(reports, args.output)
    print(format_table(reports))
    return EXIT_OK


def cmd_config(args):
    text = config_reference() if args.reference else load_config(args).to_json()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file (see `songprint config --reference`)")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="override one configuration value; repeatable")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker processes; never changes any output (default 1)")

    p = argparse.ArgumentParser(prog="songprint", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract", parents=[common], help="WAV directory -> fingerprint CSV")
    s.add_argument("input_dir")
    s.add_argument("-o", "--output", required=True, help="fingerprint CSV to write")
    s.add_argument("--labels", help="CSV with columns file,label; default: MGB/ and Other/ subdirectories")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("smote", parents=[common], help="build the extended SMOTE replicates")
    s.add_argument("dataset")
    s.add_argument("-o", "--output", required=True, help="directory for replicate CSVs + manifest.json")
    s.set_defaults(func=cmd_smote)

    s = sub.add_parser("sweep", parents=[common], help="DTW threshold sweep (TP/TN/W.Avg vs beta)")
    s.add_argument("dataset")
    s.add_argument("-o", "--output", required=True, help="output prefix; writes PREFIX.csv and PREFIX.json")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("experiment", parents=[common], help="repeated LOOCV of one technique")
    s.add_argument("dataset")
    s.add_argument("--technique", required=True, choices=TECHNIQUES)
    s.add_argument("--kind", default="simple", choices=KINDS)
    s.add_argument("-o", "--output", required=True, help="output prefix; writes PREFIX.csv and PREFIX.json")
    s.add_argument("--save-model", help="also train on the whole dataset and save the model JSON here")
    s.add_argument("--render-tree", help="c45 only: write the full-data tree as indented text")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("fixtures", parents=[common], help="write the synthetic 7 + 17 song corpus")
    s.add_argument("output_dir")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--duration", type=float, default=1.0, help="seconds per song")
    s.set_defaults(func=cmd_fixtures)

    s = sub.add_parser("report", parents=[common], help="combine experiment JSONs into one table")
    s.add_argument("reports", nargs="+")
    s.add_argument("-o", "--output", help="summary CSV to write")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("config", parents=[common], help="print the effective configuration")
    s.add_argument("--reference", action="store_true", help="print the configuration reference instead")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_config)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"songprint {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SongprintError as exc:
        print(f"songprint {args.command}: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
