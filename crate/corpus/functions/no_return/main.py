def record(store, item):
    store.append(item)


bucket = []
outcome = record(bucket, "x")
