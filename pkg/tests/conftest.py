import hypothesis

hypothesis.settings.register_profile("multiworld", deadline=None)
hypothesis.settings.load_profile("multiworld")
