"""
From raw data to training pairs
===============================

An E2E meaning representation and a WebNLG triple set go through
lowercasing, delexicalisation and tokenisation. The delexicalised output is
what the model sees; relexicalisation puts the values back.
"""

from d2tnlg.corpus import (CHAR, WORD, MeaningRepresentation, build_vocab, char_tokenize, delex_e2e,
                           delex_webnlg, parse_e2e_mr, preprocess_pair, relexicalize, serialize_input,
                           word_tokenize)
from d2tnlg.corpus.pipeline import prepare_mr

mr = parse_e2e_mr("name[Midsummer House], customer rating [average], near [The Bakers]")
ref = "Midsummer house has an average customer rating and is near The Bakers."
print(mr.slots)
print(serialize_input(mr))

dmr, text, record = delex_e2e(mr, ref)
print(serialize_input(dmr))
print(text)
print(relexicalize(text, record))

# WebNLG: entities become AGENT / PATIENT / BRIDGE by their roles
web = prepare_mr(MeaningRepresentation.webnlg([("Abilene Regional Airport", "cityServed", "Abilene"),
                                               ("Abilene", "isPartOf", "Texas")]))
wmr, wtext, wrec = delex_webnlg(web, "abilene is in texas and is served by the abilene regional airport.")
print(serialize_input(wmr))
print(wtext, wrec.mapping)

# word and character views of the same pair
pair = preprocess_pair(mr, ref, WORD)
print(pair.source)
print(pair.target)
print(word_tokenize("It's near the Bakers, isn't it?"))
print(char_tokenize("a b")[:5])

vin, vout, stats = build_vocab([(pair.source, pair.target)], WORD)
print(stats.table("one pair, word mode"))
cpair = preprocess_pair(mr, ref, CHAR)
print(len(build_vocab([(cpair.source, cpair.target)], CHAR)[1]), "char output symbols incl. reserved")
