def register(target):
    target.tag = "registered"
    return target


@register
class Plugin:
    def name(self):
        return "plugin"


instance = Plugin()
label = instance.name()
marker = Plugin.tag
