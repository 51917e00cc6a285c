"""Tests for Pauli words, sums and decomposition."""

import numpy as np
import pytest

from qad_gradients.exceptions import PauliError
from qad_gradients.pauli import PauliSum, PauliWord, commutes, decompose, multiply, qubitwise_commutes


class TestPauliWord:
    """Test suite for PauliWord."""

    def test_label_round_trip(self):
        """Test labels survive parsing."""
        assert PauliWord.from_label("XIZY").label == "XIZY"

    def test_invalid_letter(self):
        """Test unknown letters are rejected."""
        with pytest.raises(PauliError, match="Invalid Pauli letter"):
            PauliWord.from_label("XQ")

    def test_weight_and_support(self):
        """Test weight counts non-identity letters."""
        word = PauliWord.from_label("XIZY")
        assert word.weight == 3
        assert word.support == [0, 2, 3]
        assert not word.is_identity
        assert PauliWord.identity(3).is_identity

    def test_qubit_zero_is_most_significant(self):
        """Test X on qubit 0 flips the leading basis bit."""
        matrix = PauliWord.from_label("XI").to_matrix()
        state = np.zeros(4)
        state[0] = 1.0
        assert np.argmax(np.abs(matrix @ state)) == 2

    def test_matrix_matches_kron(self):
        """Test word matrices equal tensor products."""
        x = np.array([[0, 1], [1, 0]])
        y = np.array([[0, -1j], [1j, 0]])
        z = np.diag([1, -1])
        expected = np.kron(np.kron(y, z), x)
        assert np.allclose(PauliWord.from_label("YZX").to_matrix(), expected)

    def test_extend_and_embed(self):
        """Test appending and embedding qubits."""
        word = PauliWord.from_label("XZ")
        assert word.extend("IY").label == "XZIY"
        assert word.embed([3, 1], 4).label == "IZIX"

    @pytest.mark.parametrize(
        "label, positions, width, expected",
        [
            ("XZ", [2, 0], 3, "ZIX"),
            ("XYZ", [0, 2, 1], 3, "XZY"),
            ("YY", [1, 0], 2, "YY"),
            ("ZXY", [3, 0, 2], 4, "XIYZ"),
        ],
    )
    def test_embed_multi_letter(self, label, positions, width, expected):
        """Test every non-identity letter lands on its target qubit."""
        assert PauliWord.from_label(label).embed(positions, width).label == expected

    def test_embed_wrong_positions(self):
        """Test embedding needs one position per qubit."""
        with pytest.raises(PauliError):
            PauliWord.from_label("XZ").embed([0], 3)


class TestPauliAlgebra:
    """Test suite for products and commutation."""

    def test_multiply_phases(self):
        """Test XY = iZ and YX = -iZ."""
        x = PauliWord.from_label("X")
        y = PauliWord.from_label("Y")
        assert multiply(x, y) == (1j, PauliWord.from_label("Z"))
        assert multiply(y, x) == (-1j, PauliWord.from_label("Z"))

    def test_multiply_matches_matrices(self):
        """Test the product phase against dense matrices."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = PauliWord.from_label("".join(rng.choice(list("IXYZ"), 3)))
            b = PauliWord.from_label("".join(rng.choice(list("IXYZ"), 3)))
            phase, word = multiply(a, b)
            assert np.allclose(a.to_matrix() @ b.to_matrix(), phase * word.to_matrix())

    def test_commutation(self):
        """Test full and qubit-wise commutation."""
        xx = PauliWord.from_label("XX")
        zz = PauliWord.from_label("ZZ")
        zx = PauliWord.from_label("ZX")
        assert commutes(xx, zz)
        assert not qubitwise_commutes(xx, zz)
        assert not commutes(zz, zx)
        assert qubitwise_commutes(PauliWord.from_label("XI"), PauliWord.from_label("XZ"))

    @pytest.mark.parametrize("seed", range(10))
    def test_commutes_matches_matrix_commutator(self, seed):
        """Test commutes iff the dense commutator vanishes."""
        rng = np.random.default_rng(seed)
        for _ in range(20):
            a = PauliWord.from_label("".join(rng.choice(list("IXYZ"), 3)))
            b = PauliWord.from_label("".join(rng.choice(list("IXYZ"), 3)))
            ma, mb = a.to_matrix(), b.to_matrix()
            assert commutes(a, b) == np.allclose(ma @ mb - mb @ ma, 0.0)

    def test_length_mismatch(self):
        """Test words of different widths are rejected."""
        with pytest.raises(PauliError, match="length mismatch"):
            commutes(PauliWord.from_label("X"), PauliWord.from_label("XX"))


class TestPauliSum:
    """Test suite for PauliSum."""

    def test_duplicates_merge(self):
        """Test repeated words add up and cancelling words vanish."""
        op = PauliSum([(1.0, "XZ"), (0.5, "XZ"), (1.0, "YY"), (-1.0, "YY")])
        assert len(op) == 1
        assert op.terms[0][0] == pytest.approx(1.5)

    def test_term_count_excludes_identity(self):
        """Test N counts non-identity terms only."""
        op = PauliSum([(2.0, "II"), (1.0, "ZI"), (1.0, "IZ")])
        assert op.term_count == 2
        assert op.identity_coefficient == pytest.approx(2.0)
        assert op.non_identity().term_count == len(op.non_identity()) == 2

    def test_complex_coefficient_rejected(self):
        """Test coefficients must be real."""
        with pytest.raises(PauliError, match="not real"):
            PauliSum([(1j, "X")])

    def test_empty_needs_width(self):
        """Test an empty sum needs an explicit width."""
        with pytest.raises(PauliError):
            PauliSum([])
        assert PauliSum.zero(2).num_qubits == 2

    def test_json_terms(self):
        """Test the [[coeff, label], ...] form."""
        op = PauliSum.from_terms([[0.5, "XY"], [-1, "ZZ"]])
        assert op.to_terms() == [[0.5, "XY"], [-1.0, "ZZ"]]

    def test_arithmetic(self):
        """Test sums, differences and scaling."""
        a = PauliSum([(1.0, "X")])
        b = PauliSum([(2.0, "Z")])
        assert np.allclose((a + 2 * b).to_matrix(), a.to_matrix() + 2 * b.to_matrix())
        assert (a - a).term_count == 0
        assert (-a).terms[0][0] == -1.0

    def test_is_commuting(self, table3_operator):
        """Test commutativity of whole sums."""
        assert not table3_operator.is_commuting()
        assert PauliSum([(1.0, "ZZI"), (1.0, "IZZ"), (1.0, "ZIZ")]).is_commuting()

    def test_two_eigenvalue_spectrum(self):
        """Test the sum over {I,X}^4 has eigenvalues 0 and 16."""
        labels = [
            a + b + c + d for a in "IX" for b in "IX" for c in "IX" for d in "IX"
        ]
        op = PauliSum([(1.0, label) for label in labels])
        assert op.eigen_spectrum() == pytest.approx([0.0, 16.0])

    def test_spectrum_of_field(self):
        """Test ZI + IZ has three eigenvalues."""
        assert PauliSum([(1.0, "ZI"), (1.0, "IZ")]).eigen_spectrum() == pytest.approx(
            [-2.0, 0.0, 2.0]
        )


class TestDecompose:
    """Test suite for Hermitian decomposition."""

    def test_reconstructs_random_hermitian(self):
        """Test decompose(h).to_matrix() == h."""
        rng = np.random.default_rng(7)
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        h = a + a.conj().T
        assert np.allclose(decompose(h).to_matrix(), h, atol=1e-10)

    def test_known_coefficients(self):
        """Test a hand-built operator decomposes into its terms."""
        op = PauliSum([(0.3, "XY"), (-1.2, "ZI"), (0.7, "II")])
        result = decompose(op.to_matrix())
        assert result.approx_equal(op)
        assert [w.label for w in result.words] == sorted(w.label for w in result.words)

    def test_rejects_non_hermitian(self):
        """Test non-Hermitian input."""
        with pytest.raises(PauliError, match="not Hermitian"):
            decompose(np.array([[0, 1], [0, 0]]))

    def test_rejects_bad_dimension(self):
        """Test dimensions must be powers of two."""
        with pytest.raises(PauliError, match="power of two"):
            decompose(np.eye(3))
