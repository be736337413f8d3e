class Counter:
    def __init__(self, start):
        self.value = start

    def increment(self, step):
        self.value += step
        return self.value


counter = Counter(1)
total = counter.increment(2)
