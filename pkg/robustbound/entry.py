import os
import sys


def run(argv, rename_subcommand=False):
    """
    Hand argv to Django's command dispatcher. With rename_subcommand the
    first argument may be hyphenated (`zeta-sharp` runs `zeta_sharp`).
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'robustbound.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError('Django is not importable; install requirements.txt into the active environment') from exc

    argv = list(argv)
    if rename_subcommand:
        argv[0] = 'robust-bound'
        if len(argv) > 1 and not argv[1].startswith('-'):
            argv[1] = argv[1].replace('-', '_')
    execute_from_command_line(argv)
