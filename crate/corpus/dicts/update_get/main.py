def add_entry(store, name, amount):
    store[name] = amount
    default = store.get("missing", 0.0)
    return default


data = {}
fallback = add_entry(data, "x", 3)
size = len(data)
