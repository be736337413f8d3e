def make_scaler(factor):
    scaler = lambda x: x * factor
    return scaler


triple = make_scaler(3)
value = triple(2)
