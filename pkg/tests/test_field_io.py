import struct

import numpy as np
import pytest

from lfl.exceptions import ConfigError, GridMismatchError
from lfl.models.foliation import ModelKind, build_model
from lfl.services.forms import alpha_form
from lfl.services.metric_generator import seeded_fourier_metric
from lfl.utils.field_io import MAGIC, load_field, load_form, read_field, read_model, save_form, write_field

from conftest import grid


def test_header_layout(tmp_path, small_torus):
    values = np.arange(512, dtype=np.float64).reshape(small_torus.shape)
    path = write_field(tmp_path / "f.lfld", values, small_torus)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC
    assert struct.unpack_from("<4I", raw, 8) == (3, 8, 8, 8)
    assert raw[24] == 0
    assert len(raw) == 25 + 512 * 8
    assert struct.unpack_from("<d", raw, 25 + 8)[0] == 1.0


def test_real_and_complex_fields(tmp_path, small_torus):
    real = seeded_fourier_metric(small_torus, 5, 2, 1.0).u
    complex_field = real + 1j * np.roll(real, 1, axis=0)
    np.testing.assert_array_equal(read_field(write_field(tmp_path / "r.lfld", real)), real)
    restored = read_field(write_field(tmp_path / "c.lfld", complex_field))
    assert restored.dtype == np.complex128
    np.testing.assert_array_equal(restored, complex_field)


def test_sidecar_model(tmp_path, sheared_torus):
    path = write_field(tmp_path / "m.lfld", np.zeros(sheared_torus.shape), sheared_torus)
    assert read_model(path) == sheared_torus
    assert load_field(path, sheared_torus).shape == sheared_torus.shape


def test_load_on_other_model(tmp_path, torus, small_torus):
    path = write_field(tmp_path / "m.lfld", np.zeros(torus.shape), torus)
    with pytest.raises(ConfigError):
        load_field(path, small_torus)


def test_write_checks_grid(tmp_path, torus):
    with pytest.raises(GridMismatchError):
        write_field(tmp_path / "bad.lfld", np.zeros((4, 4, 4)), torus)


@pytest.mark.parametrize(
    "content",
    [b"", b"NOTLFLD1" + b"\0" * 16, MAGIC + struct.pack("<4I", 3, 4, 4, 4) + b"\0" + b"\0" * 10,
     MAGIC + struct.pack("<4I", 3, 4, 4, 4) + b"\x07" + b"\0" * 512],
)
def test_malformed_files(tmp_path, content):
    path = tmp_path / "broken.lfld"
    path.write_bytes(content)
    with pytest.raises(ConfigError):
        read_field(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        read_field(tmp_path / "absent.lfld")


def test_form_manifest(tmp_path):
    model = build_model(1, ModelKind.PERIODIC_PRODUCT, grid(8))
    form = alpha_form(model, seeded_fourier_metric(model, 3, 2, 0.5))
    manifest = save_form(tmp_path / "forms", "alpha", form, model)
    restored, restored_model = load_form(manifest)
    assert restored_model == model
    assert (restored.dim, restored.degree) == (form.dim, form.degree)
    assert restored.indices == form.indices
    for index in form.indices:
        np.testing.assert_array_equal(restored.components[index], form.components[index])


def test_bad_manifest(tmp_path):
    path = tmp_path / "x.manifest.json"
    path.write_text("{}")
    with pytest.raises(ConfigError):
        load_form(path)
