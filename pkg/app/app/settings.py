"""
Django settings for the iris matching project.

The project has no web surface: Django provides the settings layer, the
logging configuration, the management-command runner used as the batch
command line and the test runner.

For the full list of Django settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Only used by Django internals; nothing here is signed or served.
SECRET_KEY = os.environ.get('IRIS_SECRET_KEY', 'iris-batch-not-a-secret')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'core',
    'geometry',
    'biotemplates',
    'hdbif',
    'embedding',
    'crypts',
    'identify',
    'evaluation',
]

# No models: templates, galleries and score files live on disk.
DATABASES = {}

USE_TZ = True

TIME_ZONE = 'UTC'


# Logging

IRIS_LOG_LEVEL = os.environ.get('IRIS_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': IRIS_LOG_LEVEL,
            'propagate': False,
        }
        for app in INSTALLED_APPS
    },
}


# Image preprocessing

# (width, height) fed to segmentation / circle estimation
IRIS_SEGMENTATION_SIZE = (320, 240)
# (width, height) fed to the rubber sheet
IRIS_NORMALIZATION_SIZE = (640, 480)

IRIS_POLAR_RADIAL_RES = 64
IRIS_POLAR_ANGULAR_RES = 512

# Hough radius search floor, pixels
IRIS_HOUGH_MIN_RADIUS = 8
IRIS_HOUGH_DEGENERATE_PUPIL_RATIO = 0.3


# HDBIF

IRIS_FILTER_COUNT = 7
IRIS_FILTER_SIZE = 9
IRIS_FILTER_SEED = 0
IRIS_MAX_SHIFT = 16
IRIS_SHIFT_STRATEGY = 'even_then_neighbors'
# fraction of k*R*A bits that must survive masking
IRIS_MIN_BITS_FRACTION = 0.01


# CRYPTS

IRIS_EMD_SIZE_RATIO_MAX = 2.0
IRIS_EMD_MIN_OVERLAP = 0.1
# None lets the solver size its own pivot budget from the problem
IRIS_EMD_MAX_ITERATIONS = None
IRIS_CRYPT_CONNECTIVITY = 8


# Identification

IRIS_CANDIDATE_LIST_LENGTH = 50
IRIS_FAILURE_POLICY = 'sentinel'
IRIS_SEARCH_WORKERS = int(os.environ.get('IRIS_SEARCH_WORKERS', '1'))
IRIS_TEMPLATE_BUDGET_SECONDS = 1.5
IRIS_SEARCH_BUDGET_SECONDS = 25.0


# Evaluation

IRIS_FTE_THRESHOLD = 0.30
IRIS_FMR_TARGETS = (0.001, 0.01)
IRIS_RANKS = (1, 5, 10)
IRIS_HISTOGRAM_BINS = 50
