def shout(words):
    # join and uppercase
    return ' '.join(words).upper()


phrase = shout(['hello', 'there'])
assert phrase == 'HELLO THERE', 'unexpected'
print(phrase)
