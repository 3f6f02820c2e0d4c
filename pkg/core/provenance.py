from robustbound import __version__

TOOL = 'robust-bound'


def provenance_line(command, seed=None, grid=None, tau_unc=None):
    """
    First line of every output file. Carries no timestamp, so identical
    runs write identical files.
    """
    parts = [f'# {TOOL} {__version__}', f'command={command}']
    parts.append(f'seed={seed if seed is not None else "-"}')
    parts.append(f'grid={grid if grid is not None else "-"}')
    parts.append(f'tau_unc={tau_unc:g}' if tau_unc is not None else 'tau_unc=-')
    return ', '.join(parts)
