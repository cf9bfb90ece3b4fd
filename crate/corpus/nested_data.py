config = {
    'server': {'host': 'localhost', 'port': 8080},
    'tags': ['a', 'b'],
}
port = config['server']['port']
tags = config['tags'] + ['c']
print(port, tags)
