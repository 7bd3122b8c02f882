"""Command-line client for the imaging service.

The CLI builds request payloads and posts them to the service API.  With no
``--server`` it mounts the application in-process over an ASGI transport,
so everything works offline on the local filesystem; pointing ``--server``
(or MWBEAM_SERVER) at a running ``mwbeam serve`` instance sends the same
requests over HTTP instead.  Lengths on the command line are in centimeters
(resolutions in millimeters) and are converted to meters here.
"""

from __future__ import annotations

import asyncio

import click
import httpx

from . import __version__
from .service import create_app

CM = 1e-2
MM = 1e-3


def call_service(endpoint: str, payload: dict, server: str | None) -> dict:
    if server:
        resp = httpx.post(server.rstrip("/") + endpoint, json=payload, timeout=None)
    else:

        async def _go():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://mwbeam.service"
            ) as client:
                return await client.post(endpoint, json=payload, timeout=None)

        resp = asyncio.run(_go())
    if resp.status_code >= 400:
        try:
            detail = resp.json()["detail"]
        except Exception:
            detail = resp.text
        if isinstance(detail, list):  # pydantic validation errors
            first = detail[0]
            loc = ".".join(str(p) for p in first.get("loc", []) if p != "body")
            msg = first.get("msg", "invalid value")
            msg = msg.removeprefix("Value error, ")
            detail = f"{loc}: {msg}" if loc else msg
        raise click.ClickException(str(detail))
    return resp.json()


def _mode_to_si(text: str) -> str:
    """CLI modes carry the auto diameter in cm; the service expects meters."""
    s = text.strip().lower()
    if s.startswith("auto:"):
        return f"auto:{float(s.split(':', 1)[1]) * CM}"
    return s


server_option = click.option(
    "--server",
    envvar="MWBEAM_SERVER",
    default=None,
    help="Service URL; default runs the service in-process.",
)
threads_option = click.option(
    "--threads",
    envvar="MWBEAM_THREADS",
    default=1,
    show_default=True,
    type=click.IntRange(min=1),
    help="Worker threads for focal-point evaluation.",
)


@click.group()
@click.version_option(__version__)
def main():
    """Confocal microwave imaging: simulate, image, refine, check, bench."""


@main.command()
@click.option("--preset", type=click.Choice(["dataset1", "dataset2"]), default=None)
@click.option("--phantom-radius", type=float, default=None, help="Phantom radius [cm].")
@click.option("--tumor", type=float, nargs=2, default=None, help="Tumor center x y [cm].")
@click.option("--tumor-diameter", type=float, default=1.0, show_default=True, help="[cm]")
@click.option("--tumor-contrast", type=float, default=1.0, show_default=True)
@click.option("--tumor-free", is_flag=True, help="No scatterer (noise-only channels).")
@click.option("--antennas", type=int, default=12, show_default=True)
@click.option("--ring-radius", type=float, default=None, help="Ring radius [cm]; defaults to the phantom radius.")
@click.option("--n-samples", type=int, default=256, show_default=True)
@click.option("--noise-std", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sample-interval", type=float, default=1e-11, show_default=True, help="[s]")
@click.option("--speed", type=float, default=2.99792458e8, show_default=True, help="[m/s]")
@click.option("-o", "--output", required=True, type=click.Path())
@server_option
def simulate(preset, phantom_radius, tumor, tumor_diameter, tumor_contrast, tumor_free,
             antennas, ring_radius, n_samples, noise_std, seed, sample_interval, speed,
             output, server):
    """Synthesize a multistatic backscatter dataset file."""
    payload = {
        "preset": preset,
        "tumor_diameter": tumor_diameter * CM,
        "tumor_contrast": tumor_contrast,
        "tumor_free": tumor_free,
        "n_antennas": antennas,
        "sample_interval": sample_interval,
        "propagation_speed": speed,
        "n_samples": n_samples,
        "noise_std": noise_std,
        "seed": seed,
        "output": output,
    }
    if phantom_radius is not None:
        payload["phantom_radius"] = phantom_radius * CM
    if tumor:
        payload["tumor_center"] = [tumor[0] * CM, tumor[1] * CM]
    if ring_radius is not None:
        payload["ring_radius"] = ring_radius * CM
    out = call_service("/simulate", payload, server)
    click.echo(
        f"wrote {out['output']} ({out['n_antennas']} antennas, "
        f"{out['n_samples']} samples, sha256 {out['sha256'][:12]}...)"
    )


@main.command()
@click.option("-i", "--input", "input_", required=True, type=click.Path())
@click.option("--kind", type=click.Choice(["das", "dmas"]), default="das", show_default=True)
@click.option("--resolution", type=float, default=1.0, show_default=True, help="[mm]")
@click.option("-o", "--output", required=True, type=click.Path())
@threads_option
@server_option
def image(input_, kind, resolution, output, threads, server):
    """Classical full-resolution image (CSV + PGM + JSON)."""
    out = call_service(
        "/image",
        {
            "input": input_,
            "kind": kind,
            "resolution": resolution * MM,
            "threads": threads,
            "output": output,
        },
        server,
    )
    pos = out["argmax_position"]
    click.echo(
        f"imaged {out['points_evaluated']} points in {out['elapsed_s']:.2f}s; "
        f"peak at cell {tuple(out['argmax_cell'])} = "
        f"({pos[0] * 100:.2f}, {pos[1] * 100:.2f}) cm"
    )
    click.echo(f"wrote {out['paths']['csv']}, {out['paths']['pgm']}, {out['paths']['report']}")


@main.command()
@click.option("-i", "--input", "input_", required=True, type=click.Path())
@click.option("--kind", type=click.Choice(["das", "dmas"]), default="das", show_default=True)
@click.option("--mode", default="auto:1", show_default=True,
              help="manual:D or auto:DIAMETER_CM.")
@click.option("--frame-fraction", type=float, default=0.25, show_default=True)
@click.option("--n-min", type=int, default=4, show_default=True)
@click.option("--min-tumor-diameter", type=float, default=1.0, show_default=True, help="[cm]")
@click.option("--resolution", type=float, default=1.0, show_default=True, help="[mm]")
@click.option("-o", "--output", required=True, type=click.Path())
@threads_option
@server_option
def framework(input_, kind, mode, frame_fraction, n_min, min_tumor_diameter, resolution,
              output, threads, server):
    """Coarse-to-fine run: decimated pass, ROI selection, composite image."""
    out = call_service(
        "/framework",
        {
            "input": input_,
            "kind": kind,
            "mode": _mode_to_si(mode),
            "frame_fraction": frame_fraction,
            "n_min": n_min,
            "min_tumor_diameter": min_tumor_diameter * CM,
            "resolution": resolution * MM,
            "threads": threads,
            "output": output,
        },
        server,
    )
    rep = out["report"]
    pos = rep["argmax_position"]
    click.echo(
        f"D={rep['decimation_factor']} iterations={rep['iterations']} "
        f"points={rep['coarse_points_evaluated']}+{rep['fine_points_evaluated']} "
        f"(full {rep['full_equivalent_points']}) reduction {rep['reduction_ratio']:.1f}x"
    )
    click.echo(
        f"peak at cell {tuple(rep['argmax_cell'])} = "
        f"({pos[0] * 100:.2f}, {pos[1] * 100:.2f}) cm; wrote {out['paths']['report']}"
    )


@main.command()
@click.option("-i", "--input", "input_", required=True, type=click.Path())
@click.option("--kind", type=click.Choice(["das", "dmas"]), default="das", show_default=True)
@click.option("--d1", type=int, required=True)
@click.option("--d2", type=int, required=True)
@click.option("--min-tumor-diameter", type=float, default=1.0, show_default=True, help="[cm]")
@click.option("--resolution", type=float, default=1.0, show_default=True, help="[mm]")
@click.option("-o", "--output", type=click.Path(), default=None, help="Verdict JSON path.")
@threads_option
@server_option
def check(input_, kind, d1, d2, min_tumor_diameter, resolution, output, threads, server):
    """Two-factor consistency check; Confirmed when the ROIs overlap."""
    out = call_service(
        "/check",
        {
            "input": input_,
            "kind": kind,
            "d1": d1,
            "d2": d2,
            "min_tumor_diameter": min_tumor_diameter * CM,
            "resolution": resolution * MM,
            "threads": threads,
            "output": output,
        },
        server,
    )
    click.echo(f"verdict: {out['verdict']}")
    a = out["detail"]["region_a"]
    b = out["detail"]["region_b"]
    click.echo(f"d1 region {a['min_cell']}..{a['max_cell']}, d2 region {b['min_cell']}..{b['max_cell']}")
    click.echo(f"wrote {out['report']}")


@main.command()
@click.option("-i", "--input", "input_", required=True, type=click.Path())
@click.option("--kinds", default="das,dmas", show_default=True)
@click.option("--modes", default="basic,auto:1", show_default=True,
              help="Comma list of basic, manual:D, auto:DIAMETER_CM.")
@click.option("--repeat", type=int, default=3, show_default=True)
@click.option("--min-tumor-diameter", type=float, default=1.0, show_default=True, help="[cm]")
@click.option("--resolution", type=float, default=1.0, show_default=True, help="[mm]")
@click.option("-o", "--output", type=click.Path(), default=None, help="Output base for CSV/JSON.")
@threads_option
@server_option
def bench(input_, kinds, modes, repeat, min_tumor_diameter, resolution, output, threads, server):
    """Benchmark table over kinds x modes (median kernel wall time)."""
    out = call_service(
        "/bench",
        {
            "input": input_,
            "kinds": [k.strip() for k in kinds.split(",") if k.strip()],
            "modes": [_mode_to_si(m) for m in modes.split(",") if m.strip()],
            "repeat": repeat,
            "min_tumor_diameter": min_tumor_diameter * CM,
            "resolution": resolution * MM,
            "threads": threads,
            "output": output,
        },
        server,
    )
    fmt = "{:<16} {:>10} {:>6} {:>9} {:>11} {:>16}"
    click.echo(fmt.format("label", "elapsed_s", "iters", "points", "reduction", "peak cell"))
    for r in out["records"]:
        click.echo(
            fmt.format(
                r["label"],
                f"{r['elapsed_s']:.3f}",
                r["iterations"],
                r["points_evaluated"],
                f"{r['reduction_ratio']:.2f}x",
                str(tuple(r["detected_cell"])),
            )
        )
    click.echo(f"wrote {out['paths']['csv']}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
def serve(host, port):
    """Run the imaging service over HTTP."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
