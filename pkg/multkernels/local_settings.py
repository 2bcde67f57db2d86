import os

# Machine-local overrides. Keep secrets in the environment, not here.

DEBUG = os.environ.get('KERNELS_DEBUG', '1') == '1'

SECRET_KEY = os.environ.get('SECRET_KEY') or 'kernels-local-only'
