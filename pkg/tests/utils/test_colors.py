import os
import sys

from topocell.utils.colors import bold, color, green, red


def test_color(monkeypatch):
    monkeypatch.delenv("NO_COLOR", raising=False)
    text = "Text"
    color_code = 1

    colored_text = color(text, color_code)

    if sys.platform == "win32" and os.getenv("TERM") != "xterm":
        assert colored_text == text
    else:
        assert colored_text == "\x1b[1mText\x1b[0m"


def test_no_color(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")

    assert bold(red("Text")) == "Text"
    assert green("Text") == "Text"
