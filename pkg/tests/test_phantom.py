import numpy as np
import pytest
from scipy import ndimage

from atmask.schemas import PhantomKind, PhantomSpec, TvmConfig
from atmask.services.phantom import make_phantom, standard_phantoms
from atmask.services.texture_map import compute_variation_map
from atmask.utils.exceptions import GeometryError
from tests.oracles import ball_count


def test_constant_phantom():
    phantom = make_phantom(PhantomSpec(kind=PhantomKind.CONSTANT, dims=(4, 5, 6), background=0.3))
    np.testing.assert_array_equal(phantom.volume.data, np.float32(0.3))
    assert not phantom.label.data.any()


def test_sphere_voxel_count():
    spec = PhantomSpec(kind=PhantomKind.SPHERE_SHELL, dims=(64, 64, 64), radius=10.0)
    phantom = make_phantom(spec)
    center = (31.5, 31.5, 31.5)
    assert int(phantom.label.data.sum()) == ball_count((64, 64, 64), center, 10.0)
    np.testing.assert_array_equal(phantom.volume.data[phantom.label.data > 0], 1.0)


def test_off_center_sphere():
    spec = PhantomSpec(kind=PhantomKind.SPHERE_SHELL, dims=(20, 20, 20), radius=4.0, center=(5.0, 6.0, 14.0))
    phantom = make_phantom(spec)
    assert int(phantom.label.data.sum()) == ball_count((20, 20, 20), (5.0, 6.0, 14.0), 4.0)
    assert phantom.label.data[5, 6, 14] == 1.0


def test_tube_is_constant_along_its_axis():
    spec = PhantomSpec(kind=PhantomKind.TUBE, dims=(16, 16, 16), radius=4.0, axis=1)
    label = make_phantom(spec).label.data
    for j in range(16):
        np.testing.assert_array_equal(label[:, j, :], label[:, 0, :])
    assert label[:, 0, :].sum() > 0


def test_textured_block_noise_bounds():
    spec = PhantomSpec(
        kind=PhantomKind.TEXTURED_BLOCK, dims=(16, 16, 16), foreground=0.5,
        noise_amplitude=0.2, box=((2, 3, 4), (10, 11, 12)), seed=8,
    )
    phantom = make_phantom(spec)
    inside = phantom.volume.data[2:10, 3:11, 4:12]
    assert int(phantom.label.data.sum()) == 8 ** 3
    assert inside.min() >= 0.3 - 1e-6 and inside.max() <= 0.7 + 1e-6
    assert inside.std() > 0
    outside = phantom.volume.data.copy()
    outside[2:10, 3:11, 4:12] = 0
    assert not outside.any()


def test_same_spec_is_bit_identical():
    spec = PhantomSpec(kind=PhantomKind.SPHERE_SHELL, dims=(16, 16, 16), radius=5.0, noise_amplitude=0.1, seed=21)
    a, b = make_phantom(spec), make_phantom(spec)
    assert np.array_equal(a.volume.data, b.volume.data)
    assert not np.array_equal(a.volume.data, make_phantom(spec.model_copy(update={"seed": 22})).volume.data)


@pytest.mark.parametrize("spec", [
    PhantomSpec(kind=PhantomKind.SPHERE_SHELL, dims=(16, 16, 16), radius=9.0),
    PhantomSpec(kind=PhantomKind.SPHERE_SHELL, dims=(16, 16, 16), radius=3.0, center=(1.0, 8.0, 8.0)),
    PhantomSpec(kind=PhantomKind.TUBE, dims=(16, 16, 16), radius=9.0),
    PhantomSpec(kind=PhantomKind.TEXTURED_BLOCK, dims=(8, 8, 8), box=((0, 0, 0), (9, 4, 4))),
])
def test_geometry_outside_volume(spec):
    with pytest.raises(GeometryError):
        make_phantom(spec)


def test_standard_set():
    phantoms = standard_phantoms(PhantomSpec(dims=(16, 16, 16), radius=5.0))
    assert [name for name, _ in phantoms] == ["sphere_shell", "tube", "textured_block"]
    block = dict(phantoms)["textured_block"].volume.data
    assert block.std() > 0


def test_variation_concentrates_on_the_sphere_surface():
    spec = PhantomSpec(kind=PhantomKind.SPHERE_SHELL, dims=(32, 32, 32), radius=10.0, spacing=(1.0, 1.0, 1.0))
    phantom = make_phantom(spec)
    u = compute_variation_map(phantom.volume, TvmConfig()).data

    z, y, x = np.ogrid[:32, :32, :32]
    dist = np.sqrt((z - 15.5) ** 2 + (y - 15.5) ** 2 + (x - 15.5) ** 2)
    shell = np.abs(dist - 10.0) <= 1.0
    interior = dist <= 4.0
    assert u[shell].mean() > 4.0 * u[interior].mean()


def test_constant_phantom_has_no_texture():
    phantom = make_phantom(PhantomSpec(kind=PhantomKind.CONSTANT, dims=(8, 16, 16)))
    assert not compute_variation_map(phantom.volume, TvmConfig()).data.any()


def test_label_is_connected():
    label = make_phantom(PhantomSpec(dims=(24, 24, 24), radius=6.0)).label.data > 0
    _, count = ndimage.label(label)
    assert count == 1
