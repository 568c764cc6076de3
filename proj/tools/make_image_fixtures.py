"""Regenerates fixtures/images: 20 small synthetic images in PNG, JPEG and PGM."""

import math
import pathlib
import random

from PIL import Image, ImageDraw

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "images"


def pattern(i: int) -> Image.Image:
    rng = random.Random(1000 + i)
    w, h = rng.choice([(96, 64), (128, 96), (160, 120), (120, 120)])
    img = Image.new("RGB", (w, h))
    px = img.load()
    kind = i % 5
    fx, fy = rng.uniform(0.5, 4.0), rng.uniform(0.5, 4.0)
    phase = rng.uniform(0, math.pi)
    for y in range(h):
        for x in range(w):
            if kind == 0:
                v = int(255 * x / (w - 1)) if i % 2 else int(255 * (1 - y / (h - 1)))
            elif kind == 1:
                v = int(127 + 127 * math.sin(fx * x / w * 2 * math.pi + phase) * math.cos(fy * y / h * 2 * math.pi))
            elif kind == 2:
                v = 255 if ((x * 8 // w) + (y * 6 // h) + i) % 2 else 30
            elif kind == 3:
                d = math.hypot(x - w / 2, y - h / 2)
                v = int(127 + 127 * math.cos(d / (3 + i)))
            else:
                v = (x * 7 + y * 13 + i * 17) % 256
            px[x, y] = (v, (v + 40 * i) % 256, 255 - v)
    draw = ImageDraw.Draw(img)
    for _ in range(3):
        x0, y0 = rng.randrange(w), rng.randrange(h)
        x1, y1 = min(w - 1, x0 + rng.randrange(8, w // 2)), min(h - 1, y0 + rng.randrange(8, h // 2))
        draw.rectangle([x0, y0, x1, y1], fill=tuple(rng.randrange(256) for _ in range(3)))
    return img


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for i in range(20):
        img = pattern(i)
        if i % 7 == 3:
            img.save(OUT / f"img{i:02d}.jpg", quality=92)
        elif i % 9 == 8:
            img.convert("L").save(OUT / f"img{i:02d}.pgm")
        else:
            img.save(OUT / f"img{i:02d}.png")


if __name__ == "__main__":
    main()
