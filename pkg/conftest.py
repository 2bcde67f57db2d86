import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'multkernels.settings')
django.setup()
