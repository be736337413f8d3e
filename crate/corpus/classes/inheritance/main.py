class Animal:
    def speak(self):
        return "..."


class Dog(Animal):
    def speak(self):
        return 1


def talk(pet):
    sound = pet.speak()
    return sound


generic = talk(Animal())
woof = talk(Dog())
