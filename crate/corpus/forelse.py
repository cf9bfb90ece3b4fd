needle = 4
for x in [1, 2, 3]:
    if x == needle:
        print('found')
        break
else:
    print('missing')
print('done')
