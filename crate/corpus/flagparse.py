def parse_flags(args):
    flags = {}
    for arg in args:
        if arg.startswith('--'):
            key = arg[2:]
            flags[key] = True
    return flags


print(parse_flags(['--fast', 'x', '--safe']))
