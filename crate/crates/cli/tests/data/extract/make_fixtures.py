"""Renders small chart images and records the endpoint responses for them."""
import hashlib
import json
import os

from PIL import Image, ImageDraw

RESPONSES = {
    "line_years": {
        "chart_type": "line", "title": "Sales in Oslo",
        "x_axis": {"title": "year", "encoding": "int", "domain": {"lo": 2000, "hi": 2005}},
        "y_axis": {"title": "value", "encoding": "float", "domain": {"lo": 0, "hi": 10}},
        "series": [{"name": "north", "points": [[2000, 1.5], [2001, 3], [2002, 2.25], [2003, 6], [2004, 7.5], [2005, 9]]}],
    },
    "bar_months": {
        "chart_type": "bar", "title": "Orders by store",
        "x_axis": {"title": "month", "encoding": "text", "domain": {"categories": ["jan", "feb", "mar", "apr"]}},
        "y_axis": {"title": "count", "encoding": "int", "domain": {"lo": 0, "hi": 40}},
        "legend_title": "series",
        "series": [
            {"name": "east", "points": [["jan", 12], ["feb", 30], ["mar", 25], ["apr", 38]]},
            {"name": "west", "points": [["jan", 8], ["feb", 14], ["mar", 22], ["apr", 19]]},
        ],
    },
    "scatter_dose": {
        "chart_type": "scatter", "title": "Yield by site",
        "x_axis": {"title": "dose", "encoding": "float", "domain": {"lo": 0, "hi": 10}},
        "y_axis": {"title": "rate", "encoding": "float", "domain": {"lo": 0, "hi": 1}},
        "series": [{"name": "alpha", "points": [[0.5, 0.1], [2, 0.35], [3.5, 0.4], [5, 0.62], [7.25, 0.7], [9.5, 0.93]]}],
    },
    "errorbar_trials": {
        "chart_type": "error_bar", "title": "Costs overall",
        "x_axis": {"title": "trial", "encoding": "int", "domain": {"lo": 1, "hi": 5}},
        "y_axis": {"title": "level", "encoding": "float", "domain": {"lo": 0, "hi": 20}},
        "series": [{"name": "urban", "points": [[1, 5], [2, 8], [3, 9.5], [4, 12], [5, 15]], "y_err": [1, 1.5, 2, 1, 2.5]}],
    },
    "line_dates": {
        "chart_type": "line", "title": "Traffic in Lima",
        "x_axis": {"title": "date", "encoding": "datetime", "domain": {"lo": "2024-01-01", "hi": "2024-01-08"}},
        "y_axis": {"title": "share", "encoding": "fraction", "domain": {"lo": 0, "hi": 1}},
        "legend_title": "series",
        "series": [
            {"name": "A", "points": [["2024-01-01", 0.25], ["2024-01-04", 0.5], ["2024-01-08", 0.75]]},
            {"name": "B", "points": [["2024-01-01", 0.5], ["2024-01-04", 0.25], ["2024-01-08", 1]]},
        ],
    },
}

MALFORMED = '{"chart_type": "pie", "title": "Share of votes", "series": []}'


def image(name, i):
    img = Image.new("RGB", (160, 120), "white")
    d = ImageDraw.Draw(img)
    d.line([(20, 10), (20, 100), (150, 100)], fill="black", width=2)
    for k in range(6):
        x, y = 25 + k * 22, 95 - ((k * (i + 3)) % 80)
        d.rectangle([x - 2, y - 2, x + 2, y + 2], fill=(40 * i % 255, 80, 160))
    d.text((30, 2), name[:12], fill="black")
    path = f"images/{name}.png"
    img.save(path, optimize=False)
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def record(digest, body):
    with open(f"fixtures/{digest}.response.json", "w") as f:
        f.write(body)
    meta = {"image_sha256": digest, "media_type": "image/png", "prompt_version": "extract-v1"}
    with open(f"fixtures/{digest}.meta.json", "w") as f:
        f.write(json.dumps(meta, indent=2) + "\n")


def main():
    os.makedirs("images", exist_ok=True)
    os.makedirs("fixtures", exist_ok=True)
    for i, (name, spec) in enumerate(RESPONSES.items()):
        record(image(name, i), json.dumps(spec, indent=2) + "\n")
    record(image("malformed_pie", 9), MALFORMED)


if __name__ == "__main__":
    main()
