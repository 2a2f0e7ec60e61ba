import importlib


def reload_shiftlab(monkeypatch, fake_version_func):
    # Patch importlib.metadata.version
    monkeypatch.setattr("importlib.metadata.version", fake_version_func)
    # Reload module to re-execute __init__.py
    if "shiftlab" in importlib.sys.modules:
        del importlib.sys.modules["shiftlab"]
    import shiftlab
    return shiftlab

def test_version_shiftlab(monkeypatch):
    def fake_version(name):
        if name == "shiftlab":
            return "0.3.0"
        raise Exception("not found")
    shiftlab = reload_shiftlab(monkeypatch, fake_version)
    assert shiftlab.__version__ == "0.3.0"

def test_version_none(monkeypatch):
    def fake_version(name):
        raise Exception("fail")
    shiftlab = reload_shiftlab(monkeypatch, fake_version)
    assert shiftlab.__version__ is None

def test_importlib_metadata_missing(monkeypatch):
    # Simulate importlib.metadata not available
    monkeypatch.setitem(importlib.sys.modules, "importlib.metadata", None)
    if "shiftlab" in importlib.sys.modules:
        del importlib.sys.modules["shiftlab"]
    import shiftlab
    assert shiftlab.__version__ is None
