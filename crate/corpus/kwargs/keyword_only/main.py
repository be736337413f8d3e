def configure(*, host, port=80):
    address = host + ":" + str(port)
    return address


local = configure(host="localhost")
remote = configure(host="example.org", port=8080)
