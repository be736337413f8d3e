import to_import


def use(value):
    converted = to_import.helper(value)
    return converted


text = use(7)
const = to_import.CONSTANT
