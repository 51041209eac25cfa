from .bianchi import Bianchi
