from mrvae.core.exceptions import FormatError, MRVAEError, NumericalError, StateError


def test_numerical_error_details():
    err = NumericalError("non-finite activations", layer_index=2, batch_index=5)
    assert str(err) == "non-finite activations (layer 2, batch 5)"
    assert err.layer_index == 2 and err.batch_index == 5
    assert str(NumericalError("plain")) == "plain"


def test_format_error_offset():
    err = FormatError("bad magic", offset=0)
    assert str(err) == "bad magic at byte offset 0"
    assert FormatError("truncated").offset is None


def test_hierarchy():
    assert issubclass(StateError, MRVAEError)
    assert issubclass(FormatError, MRVAEError)
