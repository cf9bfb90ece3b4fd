name = 'world'
greeting = 'hello, ' + name + '!'
if name == 'world':
    punct = '!'
else:
    punct = '.'
print(greeting.replace('!', punct))
