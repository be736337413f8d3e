def make_adder(base):
    def add(x):
        return base + x
    return add


adder = make_adder(10)
total = adder(5)
direct = make_adder(1)(2)
