"""Configuration constants for tracklink."""

# Sentinel stored in Assignment.target for rows matched to the dummy node
DUMMY = -1

# Label estimation defaults
DGM_DEFAULTS = {
    "LAMBDA": 0.5,
    "K": 5,
    "MAX_ITER": 10,
    "PCA_DIM": 600,
    "POOL_WINDOW": 10,
    "APG_MAX_STEPS": 100,
    "APG_TOL": 1e-6,
    "CONVERGE_TOL": 1e-5,
    "STABLE_ITERATIONS": 2,
}

# Synthetic benchmark defaults (desk scale)
SYNTH_DEFAULTS = {
    "NUM_IDENTITIES": 50,
    "LATENT_DIM": 10,
    "FEATURE_DIM": 50,
    "MIN_FRAMES": 8,
    "MAX_FRAMES": 12,
    "IDENTITY_SCALE": 0.3,
    "CAMERA_NOISE": 0.02,
    "NUISANCE_SCALE": 0.45,
    "CAMERA_SHIFT": 0.2,
    "TEST_IDENTITIES": 50,
}

# Numerical tolerances
TOLERANCES = {
    "SYMMETRY": 1e-10,
    "PSD": 1e-10,
    "ORTHONORMAL": 1e-8,
    "REPRESENTATIVE": 1e-12,
    "C0_FLOOR": 1e-6,
    "LOSS_FLOOR": 1e-12,
    "MIN_STEP": 1e-20,
}

# Exhaustive assignment oracle size limit (rows and columns)
BRUTE_FORCE_MAX = 8

# Evaluation defaults
EVAL_DEFAULTS = {
    "MIN_REGULARIZED_ALPHA": 0.5,
    "CMC_RANKS": (1, 5, 10, 20),
}

# Binary file formats
FEATURE_MAGIC = b"DGMF"
METRIC_MAGIC = b"DGMM"
FORMAT_VERSION = 1
UNKNOWN_PERSON_ID = 0xFFFFFFFF

# Labels CSV header
LABELS_HEADER = ["i", "j", "y", "cost", "soft_label"]
TRUTH_HEADER = ["i", "j"]

# CLI exit codes
EXIT_CODES = {
    "OK": 0,
    "INPUT": 2,
    "NUMERICAL": 3,
}
