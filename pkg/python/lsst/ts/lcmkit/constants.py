# This file is part of ts_lcmkit.
#
# Developed for the Vera Rubin Observatory Systems.
# This product includes software developed by the LSST Project
# (https://www.lsst.org).
# See the COPYRIGHT file at the top-level directory of this distribution
# for details of code ownership.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

__all__ = [
    "LOG_LEVEL_MINIMUM",
    "LOG_LEVEL_MAXIMUM",
    "ADAM_BETAS",
    "ADAM_EPSILON",
    "LR_FLOOR_FRACTION",
    "DECODER_STD",
    "LOG_SCALE_MINIMUM",
    "LOG_SCALE_MAXIMUM",
    "DIVERGENCE_THRESHOLD",
    "TOY2D_HIDDEN",
    "SCALING_HIDDEN",
    "SOLUTION_HIDDEN",
    "COUPLING_HIDDEN",
    "COUPLING_LAYERS",
    "TOY2D_STEPS_FULL",
    "TOY2D_STEPS_CI",
    "SCALING_STEPS_FULL",
    "SCALING_STEPS_CI",
    "ELCM_STEPS_FULL",
    "ELCM_STEPS_CI",
    "NUM_TRAIN",
    "NUM_VAL",
    "NUM_TEST",
    "MONOTONE_GRID_POINTS",
    "MONOTONE_GRID_LIMIT",
    "MONOTONE_PARENT_CONFIGS",
    "INVERSE_TOLERANCE",
    "MAX_ENUMERATION_SIZE",
    "EXHAUSTIVE_PERMUTATION_MAX",
    "MIN_IMPORTANCE_SAMPLES",
    "MIN_DISCOVERY_SAMPLES",
    "PATERNITY_RELATIVE_THRESHOLD",
    "PATERNITY_MINIMUM",
    "ENV_WORKERS",
    "ENV_CONFIG_DIR",
]

LOG_LEVEL_MINIMUM = 10
LOG_LEVEL_MAXIMUM = 50

# Adam hyperparameters
ADAM_BETAS = (0.9, 0.999)
ADAM_EPSILON = 1e-8

# Cosine annealing decays to this fraction of the initial learning rate
LR_FLOOR_FRACTION = 0.1

# Fixed standard deviation of the Gaussian decoder
DECODER_STD = 0.1

# Clamp of the log-scale of the conditional affine transforms, i.e. the scale
# is inside [1e-3, 1e3]
LOG_SCALE_MINIMUM = -6.907755278982137
LOG_SCALE_MAXIMUM = 6.907755278982137

# Training aborts when the loss exceeds this value
DIVERGENCE_THRESHOLD = 1e6

# Hidden layer widths
TOY2D_HIDDEN = (100, 100)
SCALING_HIDDEN = (64, 64, 64, 64, 64)
SOLUTION_HIDDEN = (100, 100)
COUPLING_HIDDEN = (64, 64)
COUPLING_LAYERS = 5

# Steps of the four ILCM training phases. The CI values are about one third
# of the full-scale values.
TOY2D_STEPS_FULL = (10000, 30000, 30000, 20000)
TOY2D_STEPS_CI = (3000, 10000, 10000, 7000)
SCALING_STEPS_FULL = (15000, 45000, 45000, 35000)
SCALING_STEPS_CI = (5000, 15000, 15000, 12000)

# Steps of the ELCM training of each graph
ELCM_STEPS_FULL = 30000
ELCM_STEPS_CI = 10000

# Dataset sizes in pairs
NUM_TRAIN = 100000
NUM_VAL = 10000
NUM_TEST = 10000

# Numerical monotonicity check of the mechanisms
MONOTONE_GRID_POINTS = 101
MONOTONE_GRID_LIMIT = 5.0
MONOTONE_PARENT_CONFIGS = 20

# Tolerance of the bracketed root finding
INVERSE_TOLERANCE = 1e-12

# Largest number of causal variables for the exhaustive DAG enumeration
MAX_ENUMERATION_SIZE = 4

# Largest number of causal variables for the explicit permutation search
EXHAUSTIVE_PERMUTATION_MAX = 8

MIN_IMPORTANCE_SAMPLES = 1000
MIN_DISCOVERY_SAMPLES = 100

# Default paternity threshold relative to the largest paternity score
PATERNITY_RELATIVE_THRESHOLD = 0.1
# Smallest default paternity threshold
PATERNITY_MINIMUM = 1e-12

# Environment variables
ENV_WORKERS = "LCMKIT_WORKERS"
ENV_CONFIG_DIR = "LCMKIT_CONFIG_DIR"
