"""Corpus module tests: TSV parsing, tokenization, vocabulary counts."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clueguard.corpus import (
    DataError,
    Example,
    Label,
    LabeledDataset,
    ParseError,
    Split,
    build_vocab,
    parse_tsv,
    serialize_tsv,
    token_spans,
    tokenize,
)


class TestParseTsv:
    def test_single_labeled_row(self):
        data = b"Id\tText\tLabel\n42\tOfficial count: 10 deaths\tINFORMATIVE\n"
        ds = parse_tsv(data, Split.TRAIN)
        assert len(ds) == 1
        ex = ds.examples[0]
        assert ex.id == "42"
        assert ex.text == "Official count: 10 deaths"
        assert ex.label is Label.INFORMATIVE

    def test_header_only_gives_empty_dataset(self):
        ds = parse_tsv(b"Id\tText\tLabel\n", Split.DEV)
        assert len(ds) == 0

    def test_labels_parse_case_insensitively(self):
        data = b"Id\tText\tLabel\n1\tx\tinformative\n2\ty\tUninformative\n"
        ds = parse_tsv(data, Split.TRAIN)
        assert [ex.label for ex in ds] == [Label.INFORMATIVE, Label.UNINFORMATIVE]

    def test_two_column_file_is_unlabeled(self):
        ds = parse_tsv(b"Id\tText\n7\tstay safe\n", Split.TEST)
        assert ds.examples[0].label is None
        assert not ds.is_labeled
        with pytest.raises(DataError):
            ds.labels()

    def test_crlf_line_endings(self):
        ds = parse_tsv(b"Id\tText\tLabel\r\n1\thello world\tINFORMATIVE\r\n", Split.TRAIN)
        assert ds.examples[0].text == "hello world"

    def test_text_preserved_verbatim(self):
        ds = parse_tsv(b"Id\tText\tLabel\n1\t  spaced  out @USER \tINFORMATIVE\n", Split.TRAIN)
        assert ds.examples[0].text == "  spaced  out @USER "

    @pytest.mark.parametrize(
        "data, fragment",
        [
            (b"Id\tText\tLabel\n1\tmissing label\n", "line 2"),
            (b"Id\tText\tLabel\n1\ttext\tBOGUS\n", "BOGUS"),
            (b"Id\tText\tLabel\n1\ta\tINFORMATIVE\n1\tb\tINFORMATIVE\n", "duplicate"),
            (b"", "header"),
            (b"Id\tText\tLabel\n2\t   \tINFORMATIVE\n", "empty"),
            (b"OnlyOneColumn\n", "columns"),
        ],
    )
    def test_parse_errors(self, data, fragment):
        with pytest.raises(ParseError, match=fragment):
            parse_tsv(data, Split.TRAIN)

    def test_invalid_utf8_rejected(self):
        with pytest.raises(ParseError, match="UTF-8"):
            parse_tsv(b"Id\tText\tLabel\n1\t\xff\xfe\tINFORMATIVE\n", Split.TRAIN)

    def test_error_names_offending_line(self):
        data = b"Id\tText\tLabel\n1\ta\tINFORMATIVE\n2\tb\tINFORMATIVE\nbroken row\n"
        with pytest.raises(ParseError, match="line 4"):
            parse_tsv(data, Split.TRAIN)


class TestDatasetInvariants:
    def test_duplicate_ids_rejected(self):
        with pytest.raises(DataError, match="duplicate"):
            LabeledDataset(
                split=Split.TRAIN,
                examples=(
                    Example(id="1", text="a", label=Label.INFORMATIVE),
                    Example(id="1", text="b", label=Label.INFORMATIVE),
                ),
            )

    def test_empty_text_rejected(self):
        with pytest.raises(DataError):
            Example(id="1", text="   ")

    def test_iteration_order_is_input_order(self):
        exs = tuple(Example(id=str(i), text=f"t{i}") for i in range(5))
        ds = LabeledDataset(split=Split.OTHER, examples=exs)
        assert [ex.id for ex in ds] == ["0", "1", "2", "3", "4"]


class TestTokenize:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("10 deaths", ["10", "deaths"]),
            ("@USER #COVID19 HTTPURL", ["user", "covid19", "httpurl"]),
            ("1,741 deaths compared", ["1", "741", "deaths", "compared"]),
            ("", []),
            ("!!!", []),
            ("Hello---world", ["hello", "world"]),
        ],
    )
    def test_examples(self, text, expected):
        assert tokenize(text) == expected

    @given(st.text(max_size=200))
    def test_total_function(self, text):
        tokens = tokenize(text)
        assert all(tok == tok.lower() for tok in tokens)

    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=200))
    def test_idempotent_through_rejoining(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens

    @given(st.text(alphabet="abc XYZ 019,.!@#-_é", max_size=200))
    def test_spans_agree_with_tokenize(self, text):
        spans = token_spans(text)
        assert [text[s:e].lower() for s, e in spans] == tokenize(text)


def _dataset(docs: list[tuple[str, Label]]) -> LabeledDataset:
    return LabeledDataset(
        split=Split.TRAIN,
        examples=tuple(
            Example(id=f"d{i}", text=text, label=label)
            for i, (text, label) in enumerate(docs)
        ),
    )


class TestBuildVocab:
    def test_counts_not_presence(self):
        ds = _dataset(
            [("deaths deaths", Label.INFORMATIVE), ("deaths", Label.UNINFORMATIVE)]
        )
        vocab = build_vocab(ds, min_df=2)
        assert set(vocab.terms) == {"deaths"}
        assert vocab.doc_freq["deaths"] == 2
        assert vocab.term_total("deaths") == 3
        assert vocab.class_count("deaths", Label.INFORMATIVE) == 2

    def test_min_df_threshold_can_empty_the_vocab(self):
        ds = _dataset(
            [("deaths deaths", Label.INFORMATIVE), ("deaths", Label.UNINFORMATIVE)]
        )
        assert len(build_vocab(ds, min_df=3)) == 0

    def test_fixture_corpus_has_seven_terms(self, fixture_corpus):
        vocab = build_vocab(fixture_corpus, min_df=1)
        assert len(vocab) == 7
        assert set(vocab.terms) == {
            "deaths", "reported", "rising", "stay", "home", "good", "vibes",
        }

    def test_unlabeled_example_rejected(self):
        ds = LabeledDataset(
            split=Split.TRAIN, examples=(Example(id="1", text="hello"),)
        )
        with pytest.raises(DataError, match="unlabeled"):
            build_vocab(ds, min_df=1)

    def test_empty_dataset_rejected(self):
        with pytest.raises(DataError, match="empty"):
            build_vocab(LabeledDataset(split=Split.TRAIN, examples=()), min_df=1)

    @given(
        st.lists(
            st.tuples(
                st.lists(
                    st.sampled_from("alpha beta gamma delta 10 covid".split()),
                    min_size=1,
                    max_size=8,
                ),
                st.sampled_from([Label.INFORMATIVE, Label.UNINFORMATIVE]),
            ),
            min_size=1,
            max_size=10,
        )
    )
    @settings(max_examples=50)
    def test_class_counts_sum_to_direct_totals(self, docs):
        ds = _dataset([(" ".join(toks), lab) for toks, lab in docs])
        vocab = build_vocab(ds, min_df=1)
        for term in vocab.terms:
            direct = sum(toks.count(term) for toks, _ in docs)
            assert vocab.term_total(term) == direct


# Canonical corpus rows: ids and texts that survive the wire format.
_id_st = st.text(
    alphabet=st.characters(codec="ascii", categories=("L", "N")), min_size=1, max_size=8
)
_text_st = st.text(
    alphabet="abcdefgh XYZ019@#:,.!", min_size=1, max_size=40
).filter(lambda t: t.strip())


class TestRoundTrip:
    @given(
        st.dictionaries(
            _id_st,
            st.tuples(_text_st, st.sampled_from([Label.INFORMATIVE, Label.UNINFORMATIVE])),
            min_size=1,
            max_size=12,
        )
    )
    @settings(max_examples=60)
    def test_serialize_parse_reproduces_data_rows(self, rows):
        lines = ["Id\tText\tLabel"]
        lines += [f"{i}\t{t}\t{lab.value}" for i, (t, lab) in rows.items()]
        blob = ("\n".join(lines) + "\n").encode("utf-8")
        assert serialize_tsv(parse_tsv(blob, Split.TRAIN)) == blob

    def test_unlabeled_round_trip(self):
        blob = b"Id\tText\n1\thello\n2\tworld\n"
        assert serialize_tsv(parse_tsv(blob, Split.TEST)) == blob
