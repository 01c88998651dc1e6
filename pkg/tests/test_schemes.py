import dataclasses
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import ALL_SCHEMES, dealt
from quorumcrypt import schemes as S
from quorumcrypt.groups import BN254_G1, ED25519
from quorumcrypt.rng import SeededRng
from quorumcrypt.schemes import registry, symmetric
from quorumcrypt.schemes.core import SchemeKind

MSG = b"threshold test message"


def run_scheme(scheme, shares, request, rng=None):
    """Produce shares from every party and return (request, partials)."""
    rng = rng or SeededRng("run")
    pk = shares[0].public
    kind = pk.scheme.kind
    if kind is SchemeKind.CIPHER:
        request = S.encrypt(pk, b"label", request, rng)
        return request, [S.partial_decrypt(s, request, rng) for s in shares]
    if pk.scheme is S.SchemeId.KG20:
        raise AssertionError("use frost_sign")
    if kind is SchemeKind.RANDOMNESS:
        return request, [S.coin_share(s, request, rng) for s in shares]
    return request, [S.sign_share(s, request, rng) for s in shares]


def frost_sign(shares, signers, message, rng=None):
    rng = rng or SeededRng("frost")
    pk = shares[0].public
    by_index = {s.index: s for s in shares}
    round1 = {i: S.frost_round1(by_index[i], rng) for i in signers}
    commitments = [c for _, c in round1.values()]
    request = S.frost_signing_request(pk, message, commitments)
    partials = [S.frost_round2(by_index[i], message, signers, commitments, round1[i][0]) for i in signers]
    return request, partials


def secret_of(shares):
    """Reconstruct the dealt secret from all shares with exact arithmetic."""
    pk = shares[0].public
    if pk.scheme is S.SchemeId.SH00:
        raise AssertionError("no scalar secret")
    subset = shares[: pk.params.quorum]
    return oracles.interpolate({s.index: s.secret for s in subset}, modulus=ED25519.order
                               if pk.scheme.group == "ed25519" else BN254_G1.order)


class TestCorrectness:
    @pytest.mark.parametrize("scheme", [s for s in ALL_SCHEMES if s != "KG20"])
    @pytest.mark.parametrize("n,t", [(4, 1), (7, 2)])
    def test_every_quorum_gives_a_valid_result(self, scheme, n, t):
        pk, shares = dealt(scheme, n, t)
        request, partials = run_scheme(scheme, shares, MSG)
        results = set()
        for subset in itertools.islice(itertools.combinations(partials, t + 1), 12):
            assert all(S.verify_share(pk, request, p) for p in subset)
            result = S.combine(pk, request, subset)
            assert S.verify_result(pk, request, result)
            results.add(registry.get(scheme).result_to_bytes(result, pk))
        assert len(results) == 1
        if scheme in ("SG02", "BZ03"):
            assert results == {MSG}

    @pytest.mark.parametrize("n,t", [(4, 1), (7, 2)])
    def test_frost_any_signing_set(self, n, t):
        pk, shares = dealt("KG20", n, t)
        for signers in itertools.islice(itertools.combinations(range(1, n + 1), t + 1), 6):
            request, partials = frost_sign(shares, signers, MSG)
            assert all(S.verify_share(pk, request, p) for p in partials)
            sig = S.combine(pk, request, partials)
            assert S.verify_result(pk, request, sig)
            assert S.verify_result(pk, MSG, sig)

    @pytest.mark.parametrize("scheme", ALL_SCHEMES)
    def test_shares_match_verification_keys(self, scheme):
        pk, shares = dealt(scheme)
        scheme_impl = registry.get(scheme)
        assert all(scheme_impl.check_share(s) for s in shares)

    def test_deterministic_dealing(self):
        a, _ = S.deal_keys("SG02", S.ThresholdParams(4, 1), seed=b"x")
        b, _ = S.deal_keys("SG02", S.ThresholdParams(4, 1), seed=b"x")
        c, _ = S.deal_keys("SG02", S.ThresholdParams(4, 1), seed=b"y")
        assert a == b and a != c


class TestOracles:
    def test_sg02_centralized_decryption(self):
        pk, shares = dealt("SG02")
        x = secret_of(shares)
        assert oracles.ed_encode(oracles.ed_mul(x, oracles.BASE)) == pk.group_public_key.encode()
        c = S.encrypt(pk, b"lbl", b"secret payload", SeededRng("enc"))
        u = oracles.ed_decode(c.encapsulation[0].encode())
        shared = oracles.ed_encode(oracles.ed_mul(x, u))
        key = oracles.tagged(b"quorumcrypt/SG02/kdf", shared, size=32)
        nonce = oracles.tagged(b"quorumcrypt/SG02/nonce", c.encapsulation[0].encode() + c.encapsulation[1].encode(),
                               size=12)
        assert symmetric.open_(key, nonce, c.payload, b"lbl") == b"secret payload"
        parts = [S.partial_decrypt(s, c) for s in shares[1:3]]
        assert S.combine(pk, c, parts) == b"secret payload"

    def test_bz03_centralized_decryption(self):
        pk, shares = dealt("BZ03")
        x = secret_of(shares)
        c = S.encrypt(pk, b"", b"bz payload")
        shared = (c.encapsulation[0] * x).encode()
        key = oracles.tagged(b"quorumcrypt/BZ03/kdf", shared, size=32)
        nonce = oracles.tagged(b"quorumcrypt/BZ03/nonce", c.encapsulation[0].encode(), size=12)
        assert symmetric.open_(key, nonce, c.payload, b"") == b"bz payload"

    def test_bls_signature_is_secret_times_message_point(self):
        from quorumcrypt.groups import BN254_G2, pairing
        from quorumcrypt.schemes.bls04 import message_point

        pk, shares = dealt("BLS04", 7, 2)
        x = secret_of(shares)
        parts = [S.sign_share(s, MSG) for s in shares[2:5]]
        sig = S.combine(pk, MSG, parts)
        assert sig.point == message_point(MSG) * x
        h = BN254_G1.hash_to_group(b"quorumcrypt/BLS04/message", MSG)
        assert pairing(sig.point, BN254_G2.generator()) == pairing(h, pk.group_public_key)

    def test_frost_is_plain_schnorr(self):
        pk, shares = dealt("KG20", 7, 2)
        request, partials = frost_sign(shares, (2, 4, 7), MSG)
        sig = S.combine(pk, request, partials)
        r = oracles.ed_decode(sig.commitment.encode())
        y = oracles.ed_decode(pk.group_public_key.encode())
        c = oracles.sha512_scalar(oracles.L, b"quorumcrypt/KG20/challenge", sig.commitment.encode(),
                                  pk.group_public_key.encode(), MSG)
        assert oracles.ed_mul(sig.response, oracles.BASE) == oracles.ed_add(r, oracles.ed_mul(c, y))
        assert oracles.ed_encode(oracles.ed_mul(secret_of(shares), oracles.BASE)) == pk.group_public_key.encode()

    def test_sh00_is_full_domain_hash_rsa(self):
        pk, shares = dealt("SH00")
        parts = [S.sign_share(s, MSG) for s in shares[:2]]
        sig = S.combine(pk, MSG, parts)
        mod = pk.group_public_key
        expected = oracles.fdh(b"quorumcrypt/SH00/fdh", MSG, mod.byte_length + 16, mod.n_modulus)
        assert pow(sig.value, mod.public_exponent, mod.n_modulus) == expected

    def test_sh00_matches_across_subsets(self):
        pk, shares = dealt("SH00")
        sigs = {S.combine(pk, MSG, [S.sign_share(shares[i], MSG), S.sign_share(shares[j], MSG)]).value
                for i, j in [(0, 1), (2, 3), (1, 3)]}
        assert len(sigs) == 1

    def test_cks05_coin_value(self):
        pk, shares = dealt("CKS05")
        x = secret_of(shares)
        name = b"coin-7"
        base = ED25519.hash_to_group(b"quorumcrypt/CKS05/coin", name)
        expected = oracles.tagged(b"quorumcrypt/CKS05/value",
                                  oracles.ed_encode(oracles.ed_mul(x, oracles.ed_decode(base.encode()))), size=32)
        coin = S.combine(pk, name, [S.coin_share(s, name) for s in shares[2:]])
        assert coin.value == expected
        assert S.verify_result(pk, name, coin)


class TestRobustness:
    @pytest.mark.parametrize("scheme", [s for s in ALL_SCHEMES if s != "KG20"])
    def test_corrupted_share_is_rejected(self, scheme):
        pk, shares = dealt(scheme)
        request, partials = run_scheme(scheme, shares, MSG)
        p = partials[0]
        impl = registry.get(scheme)
        other = partials[1].value
        bad = dataclasses.replace(p, value=other)
        assert not S.verify_share(pk, request, bad)
        wrong_binding = dataclasses.replace(p, binding=bytes(len(p.binding)))
        assert not S.verify_share(pk, request, wrong_binding)
        # a share for a different request does not verify either
        _, other_parts = run_scheme(scheme, shares, b"another message")
        assert not S.verify_share(pk, request, other_parts[0])
        assert impl.partial_from_bytes(impl.partial_to_bytes(p)) == p

    def test_corrupted_frost_response(self):
        pk, shares = dealt("KG20")
        request, partials = frost_sign(shares, (1, 2), MSG)
        bad = dataclasses.replace(partials[0], value=(partials[0].value + 1) % ED25519.order)
        assert not S.verify_share(pk, request, bad)
        sig = S.combine(pk, request, [bad, partials[1]])
        assert not S.verify_result(pk, request, sig)

    @pytest.mark.parametrize("scheme", [s for s in ALL_SCHEMES if s != "KG20"])
    def test_t_shares_are_not_enough(self, scheme):
        pk, shares = dealt(scheme, 7, 2)
        request, partials = run_scheme(scheme, shares, MSG)
        with pytest.raises(S.InsufficientSharesError):
            S.combine(pk, request, partials[:2])
        with pytest.raises(S.DuplicateIndexError):
            S.combine(pk, request, [partials[0], partials[0], partials[1]])

    def test_frost_missing_signer(self):
        pk, shares = dealt("KG20", 7, 2)
        request, partials = frost_sign(shares, (1, 2, 3), MSG)
        with pytest.raises(S.InsufficientSharesError):
            S.combine(pk, request, partials[:2])

    def test_frost_nonce_reuse(self):
        pk, shares = dealt("KG20")
        nonces, c1 = S.frost_round1(shares[0])
        _, c2 = S.frost_round1(shares[1])
        S.frost_round2(shares[0], MSG, (1, 2), [c1, c2], nonces)
        with pytest.raises(S.NonceReuseError):
            S.frost_round2(shares[0], b"other", (1, 2), [c1, c2], nonces)

    def test_frost_nonce_store(self):
        _, shares = dealt("KG20")
        store = S.FrostNonceStore(1)
        slots = store.generate(3, SeededRng("ns"))
        assert [s for s, _ in slots] == [0, 1, 2] and store.available() == 3
        store.take(1)
        with pytest.raises(S.NonceReuseError):
            store.take(1)
        with pytest.raises(KeyError):
            store.take(9)

    def test_frost_signing_set_checks(self):
        pk, shares = dealt("KG20", 7, 2)
        n1, c1 = S.frost_round1(shares[0])
        _, c2 = S.frost_round1(shares[1])
        with pytest.raises(S.SigningSetError):
            S.frost_signing_request(pk, MSG, [c1, c2])
        _, c3 = S.frost_round1(shares[2])
        with pytest.raises(S.SigningSetError):
            S.frost_round2(shares[3], MSG, (1, 2, 3), [c1, c2, c3], S.frost_round1(shares[3])[0])

    @pytest.mark.parametrize("scheme", ["SG02", "BZ03"])
    def test_tampered_ciphertext(self, scheme):
        pk, shares = dealt(scheme)
        c = S.encrypt(pk, b"label", MSG)
        for bad in (dataclasses.replace(c, label=b"other"),
                    dataclasses.replace(c, payload=bytes([c.payload[0] ^ 1]) + c.payload[1:])):
            assert not S.verify_ciphertext(pk, bad)
            with pytest.raises(S.InvalidCiphertextError):
                S.partial_decrypt(shares[0], bad)

    @pytest.mark.parametrize("scheme", ["SG02", "BZ03"])
    def test_ciphertext_codec(self, scheme):
        pk, _ = dealt(scheme)
        impl = registry.get(scheme)
        c = S.encrypt(pk, b"l", b"p")
        assert impl.ciphertext_from_bytes(impl.ciphertext_to_bytes(c)) == c
        with pytest.raises(S.MalformedError):
            impl.ciphertext_from_bytes(b"{}")

    def test_wrong_kind_rejected(self):
        pk, shares = dealt("BLS04")
        with pytest.raises(S.UnsupportedSchemeError):
            S.encrypt(pk, b"", b"x")
        with pytest.raises(S.UnsupportedSchemeError):
            S.partial_decrypt(shares[0], None)
        with pytest.raises(S.UnsupportedSchemeError):
            S.SchemeId.parse("RSA99")

    def test_threshold_params(self):
        with pytest.raises(ValueError):
            S.ThresholdParams(3, 3)
        assert S.ThresholdParams.bft(2) == S.ThresholdParams(7, 2)


@settings(max_examples=15, deadline=None)
@given(st.binary(max_size=300), st.binary(max_size=20), st.randoms(use_true_random=False))
def test_sg02_roundtrip_property(plaintext, label, rnd):
    pk, shares = dealt("SG02", 7, 2)
    c = S.encrypt(pk, label, plaintext, rnd)
    subset = rnd.sample(shares, 3)
    assert S.combine(pk, c, [S.partial_decrypt(s, c, rnd) for s in subset]) == plaintext


@settings(max_examples=10, deadline=None)
@given(st.binary(max_size=64), st.randoms(use_true_random=False))
def test_bls_subset_independence_property(message, rnd):
    pk, shares = dealt("BLS04", 7, 2)
    a = S.combine(pk, message, [S.sign_share(s, message) for s in rnd.sample(shares, 3)])
    b = S.combine(pk, message, [S.sign_share(s, message) for s in rnd.sample(shares, 3)])
    assert a == b and S.verify_result(pk, message, a)
