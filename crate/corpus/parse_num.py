def parse_num(text):
    try:
        return int(text)
    except ValueError:
        return None


values = ['3', 'x', '12']
parsed = [parse_num(v) for v in values]
print(parsed)
