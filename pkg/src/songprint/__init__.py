"""Bird-song identification from mean MFCC fingerprints.

Pipeline: WAV decoding and framing (:mod:`.audio_io`), MFCC mean
fingerprints (:mod:`.features`), DTW reference detection
(:mod:`.dtw_detect`), SMOTE replicates (:mod:`.sampling`), four learners
(:mod:`.classifiers`) and repeated leave-one-out evaluation
(:mod:`.evaluation`).
"""
__version__ = "0.1.0"

from ._accel import backend
from .audio_io import AudioClip, FrameSequence, decode_wav, encode_wav, frame_signal, read_wav
from .dtw_detect import (DtwResult, SweepReport, classify_by_threshold, dtw_distance,
                         reference_fingerprint, threshold_sweep)
from .evaluation import ConfusionCounts, EvalReport, loocv, rates, run_experiment
from .features import (MGB, OTHER, Fingerprint, MelFilterbank, MfccMatrix, MfccSettings,
                       build_filterbank, extract_fingerprint, mean_fingerprint, mfcc,
                       read_fingerprints, write_fingerprints)
from .sampling import LabeledDataset, SmoteParams, make_extended_datasets, smote

__all__ = [
    "AudioClip", "ConfusionCounts", "DtwResult", "EvalReport", "Fingerprint", "FrameSequence",
    "LabeledDataset", "MGB", "MelFilterbank", "MfccMatrix", "MfccSettings", "OTHER",
    "SmoteParams", "SweepReport", "backend", "build_filterbank", "classify_by_threshold",
    "decode_wav", "dtw_distance", "encode_wav", "extract_fingerprint", "frame_signal",
    "loocv", "make_extended_datasets", "mean_fingerprint", "mfcc", "rates",
    "read_fingerprints", "read_wav", "reference_fingerprint", "run_experiment", "smote",
    "threshold_sweep", "write_fingerprints",
]
