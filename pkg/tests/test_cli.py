import dataclasses
import random

import pytest

from src.cli import main
from src.config import CURVE_DIR, SAMPLE_SEQUENCE_DIR
from src.ecelgamal import encrypt_point_with, read_public_key
from src.field_curve import load_curve
from src.koblitz import KoblitzParams, encode_to_point
from src.pipeline import deserialize, serialize

# magic, version, "\x06tiny17", fingerprint, r, K, B, bit length, block count
TINY_HEADER_SIZE = 4 + 1 + 7 + 32 + 1 + 4 + 2 + 8 + 4


@pytest.fixture
def env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("DECC_TEST_MODE", "1")
    monkeypatch.setenv("DECC_STORE", str(tmp_path / "store"))
    monkeypatch.delenv("DECC_CURVE", raising=False)
    return tmp_path


@pytest.fixture
def store(env):
    assert main(["seq", "import", str(SAMPLE_SEQUENCE_DIR / "litmus.fasta"),
                 str(SAMPLE_SEQUENCE_DIR / "balsaminaceae.fasta")]) == 0
    return env / "store"


def keygen(prefix, *flags):
    assert main(list(flags) + ["keygen", "--out", str(prefix)]) == 0
    return f"{prefix}.pub", f"{prefix}.priv"


def test_seq_import_and_list(store, capsys):
    capsys.readouterr()
    assert main(["seq", "list"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "seq_id\tlength\tfingerprint"
    assert lines[1].startswith("balsaminaceae\t268\t")
    assert lines[2].startswith("litmus\t255\t")


def test_seq_import_conflict(store):
    assert main(["seq", "import", str(SAMPLE_SEQUENCE_DIR / "litmus.fasta")]) == 3
    assert main(["seq", "import", "--force", str(SAMPLE_SEQUENCE_DIR / "litmus.fasta")]) == 0


def test_seq_import_binary_file(env, capsys):
    fasta = env / "binary.fasta"
    fasta.write_bytes(b">x\nAC\xff\xfeGT\n")
    assert main(["seq", "import", str(fasta)]) == 3
    assert "byte offset 5" in capsys.readouterr().err


def test_non_ascii_curve_file(env):
    curve = env / "bad.curve"
    curve.write_bytes((CURVE_DIR / "tiny17.curve").read_bytes() + b"# \xe9\n")
    assert main(["--curve", str(curve), "keygen", "--out", str(env / "k")]) == 3


def test_keygen_removes_private_key_on_failure(env, monkeypatch):
    def fail(*args, **kwargs):
        raise OSError("disk full")

    monkeypatch.setattr("src.cli.write_public_key", fail)
    assert main(["--profile", "test", "keygen", "--out", str(env / "alice")]) == 2
    assert not (env / "alice.priv").exists()
    assert not (env / "alice.pub").exists()


def test_seq_verify(store, capsys):
    assert main(["seq", "verify"]) == 0
    assert "litmus\tok" in capsys.readouterr().out

    (store / "litmus.fasta").write_text(">litmus\nACGT\n")
    assert main(["seq", "verify"]) == 5


def test_missing_store(env):
    assert main(["seq", "list"]) == 2
    assert main(["--store", str(env / "elsewhere"), "seq", "list"]) == 2


def test_keygen_force(env):
    keygen(env / "alice", "--profile", "test")
    assert main(["--profile", "test", "keygen", "--out", str(env / "alice")]) == 2
    assert main(["--profile", "test", "keygen", "--out", str(env / "alice"), "--force"]) == 0


def test_keygen_seed_reproducible(env):
    keygen(env / "a", "--seed", "1f")
    keygen(env / "b", "--seed", "1f")
    assert (env / "a.priv").read_bytes() == (env / "b.priv").read_bytes()
    assert (env / "a.pub").read_bytes() == (env / "b.pub").read_bytes()


def test_seed_ignored_outside_test_mode(env, monkeypatch):
    monkeypatch.delenv("DECC_TEST_MODE")
    keygen(env / "a", "--seed", "1f")
    keygen(env / "b", "--seed", "1f")
    assert (env / "a.priv").read_bytes() != (env / "b.priv").read_bytes()


@pytest.mark.parametrize("profile, size", [("test", 16), ("production", 21)])
def test_round_trip(store, env, profile, size):
    pub, priv = keygen(env / "bob", "--profile", profile)
    plain = bytes(random.Random(size).randrange(256) for _ in range(size))
    (env / "msg.bin").write_bytes(plain)

    assert main(["--profile", profile, "encrypt", "msg.bin", "--key", pub,
                 "--seq", "litmus", "--out", "msg.decc"]) == 0
    assert main(["decrypt", "msg.decc", "--key", priv, "--out", "msg.out"]) == 0
    assert (env / "msg.out").read_bytes() == plain

    assert main(["decrypt", "msg.decc", "--key", priv, "--seq", "litmus",
                 "--out", "msg2.out", "--workers", "2"]) == 0
    assert (env / "msg2.out").read_bytes() == plain


@pytest.fixture
def tiny_ciphertext(store, env):
    pub, priv = keygen(env / "bob", "--profile", "test")
    (env / "msg.bin").write_bytes(b"hi")
    assert main(["--profile", "test", "--seed", "7", "encrypt", "msg.bin", "--key", pub,
                 "--seq", "litmus", "--out", "msg.decc"]) == 0
    return env / "msg.decc", pub, priv


def test_encrypt_seed_reproducible(tiny_ciphertext, env):
    ct_path, pub, _ = tiny_ciphertext
    assert main(["--profile", "test", "--seed", "7", "encrypt", "msg.bin", "--key", pub,
                 "--seq", "litmus", "--out", "again.decc"]) == 0
    assert (env / "again.decc").read_bytes() == ct_path.read_bytes()


def test_inspect(tiny_ciphertext, capsys):
    ct_path, _, _ = tiny_ciphertext
    capsys.readouterr()
    assert main(["inspect", str(ct_path)]) == 0
    out = capsys.readouterr().out
    assert "curve_id\ttiny17" in out
    assert "plaintext_bit_length\t16" in out
    assert "blocks\t32" in out


def test_wrong_sequence(tiny_ciphertext, env):
    ct_path, pub, priv = tiny_ciphertext
    assert main(["decrypt", str(ct_path), "--key", priv, "--seq", "balsaminaceae",
                 "--out", "x.out"]) == 5
    assert main(["--profile", "test", "encrypt", "msg.bin", "--key", pub,
                 "--seq", "nope", "--out", "x.decc"]) == 5
    assert not (env / "x.out").exists()


def test_corrupt_magic(tiny_ciphertext, env):
    ct_path, _, priv = tiny_ciphertext
    data = ct_path.read_bytes()
    (env / "bad.decc").write_bytes(b"XECC" + data[4:])
    assert main(["decrypt", "bad.decc", "--key", priv, "--out", "x.out"]) == 3


@pytest.mark.parametrize("curve_id", [b"tiny1X", b"../p25", b"/tmp/x"])
def test_corrupt_curve_id(tiny_ciphertext, env, curve_id):
    ct_path, _, priv = tiny_ciphertext
    data = ct_path.read_bytes()
    (env / "bad.decc").write_bytes(data[:6] + curve_id + data[12:])
    assert main(["decrypt", "bad.decc", "--key", priv, "--out", "x.out"]) == 3
    assert not (env / "x.out").exists()


def test_corrupt_coordinate(tiny_ciphertext, env):
    ct_path, _, priv = tiny_ciphertext
    data = bytearray(ct_path.read_bytes())
    # x of the first block's C2; any byte >= 17 is unreduced on tiny17
    data[TINY_HEADER_SIZE + 4] ^= 0xFF
    (env / "bad.decc").write_bytes(bytes(data))
    assert main(["decrypt", "bad.decc", "--key", priv, "--out", "x.out"]) == 3


def test_tampered_block(tiny_ciphertext, env):
    ct_path, pub, priv = tiny_ciphertext
    tiny = load_curve(CURVE_DIR / "tiny17.curve")
    ct = deserialize(ct_path.read_bytes(), tiny)
    # block 1 carries reference bits 1-2 of litmus ("A" -> 0); put 1 there instead
    P_m = encode_to_point(1, tiny, KoblitzParams.for_curve(tiny, 4))
    blocks = list(ct.blocks)
    blocks[1] = encrypt_point_with(P_m, read_public_key(pub, tiny), tiny, 5)
    forged = dataclasses.replace(ct, blocks=tuple(blocks))
    (env / "forged.decc").write_bytes(serialize(forged, tiny))
    assert main(["decrypt", "forged.decc", "--key", priv, "--out", "x.out"]) == 6


def test_key_curve_mismatch(store, env):
    pub, priv = keygen(env / "prod")
    (env / "msg.bin").write_bytes(b"hi")
    assert main(["--profile", "test", "encrypt", "msg.bin", "--key", pub,
                 "--seq", "litmus", "--out", "x.decc"]) == 4


def test_missing_input(store, env):
    pub, _ = keygen(env / "bob", "--profile", "test")
    assert main(["--profile", "test", "encrypt", "nope.bin", "--key", pub,
                 "--seq", "litmus", "--out", "x.decc"]) == 2


def test_missing_key_file(store, env):
    (env / "msg.bin").write_bytes(b"hi")
    assert main(["encrypt", "msg.bin", "--key", "nope.pub", "--seq", "litmus",
                 "--out", "x.decc"]) == 4


def test_argparse_usage_error(env):
    with pytest.raises(SystemExit) as e:
        main(["encrypt"])
    assert e.value.code == 2


def test_bench(env, capsys):
    assert main(["--profile", "test", "bench", "--iterations", "2", "--size", "4"]) == 0
    out = capsys.readouterr().out
    for operation in ("scalar_mul", "koblitz_encode", "encrypt_bytes", "decrypt_bytes"):
        assert operation in out


def test_bench_csv(env):
    assert main(["--profile", "test", "bench", "--iterations", "1", "--size", "2",
                 "--out", "bench.csv"]) == 0
    header = (env / "bench.csv").read_text().splitlines()[0]
    assert header == "operation,curve_id,iterations,total_s,per_op_ms,bytes_per_s"


@pytest.mark.slow
def test_one_mebibyte_file(env):
    rng = random.Random(1)
    size = 1 << 20
    n_bases = size * 8 * 3 // 2
    bases = "".join(rng.choices("ACGT", k=n_bases))
    fasta = env / "big.fasta"
    fasta.write_text(">big\n" + "\n".join(bases[i:i + 60] for i in range(0, n_bases, 60)) + "\n")
    assert main(["seq", "import", str(fasta)]) == 0

    pub, priv = keygen(env / "bob")
    plain = rng.randbytes(size)
    (env / "big.bin").write_bytes(plain)
    assert main(["encrypt", "big.bin", "--key", pub, "--seq", "big", "--out", "big.decc",
                 "--workers", "4"]) == 0
    assert main(["decrypt", "big.decc", "--key", priv, "--out", "big.out",
                 "--workers", "4"]) == 0
    assert (env / "big.out").read_bytes() == plain
