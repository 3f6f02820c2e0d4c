import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'robustbound.settings')
django.setup()
