# File: core/asgi.py
"""ASGI entry point of PRD Lab, served by daphne (see entrypoint.sh).

Exposes the stored runs API, the analytic table endpoint and the admin.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')

application = get_asgi_application()
