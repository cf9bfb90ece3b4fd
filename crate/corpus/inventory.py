inventory = {
    'apples': 5,
    'pears': 2,
}
inventory['plums'] = 9
del inventory['pears']
for name, count in sorted(inventory.items()):
    print(name, count)
