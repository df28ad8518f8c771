# Package marker so importlib.resources can locate defaults.yaml.
