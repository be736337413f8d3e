import json


def encode(payload):
    text = json.dumps(payload)
    return text


def decode(text):
    data = json.loads(text)
    return data


raw = encode({"k": [1, 2]})
parsed = decode(raw)
