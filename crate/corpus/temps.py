temps = [21.5, 19.0, 23.25]
avg = sum(temps) / len(temps)
hottest = max(temps)
if avg > 20.0 and hottest < 30.0:
    print('mild')
else:
    print('extreme')
