class Account:
    rate = 0.02

    def __init__(self, balance):
        self.balance = balance

    def grow(self):
        self.balance *= 1 + Account.rate


a = Account(100.0)
a.grow()
print(a.balance)
