rows = 'a,1;b,2;c,3'
table = {}
for chunk in rows.split(';'):
    key, value = chunk.split(',')
    table[key] = int(value)
print(table.get('b', 0))
print(len(table))
