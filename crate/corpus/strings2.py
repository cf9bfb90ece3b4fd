banner = (
    'first line '
    'second line'
)
multi = """one
two"""
raw = r'no\escape'
print(len(banner), len(multi), len(raw))
