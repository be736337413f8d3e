def build(name, value):
    cls = type(name, (), {})
    setattr(cls, "payload", value)
    return cls


Made = build("Made", 7)
instance = Made()
payload = instance.payload
