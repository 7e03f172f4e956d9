"""
Templates, classification and reranking
=======================================

Two templates realise the same restaurant description in different orders.
The classifier tells them (and their mixtures) apart; the reranker counts
missing and invented attribute values.
"""

from d2tnlg.corpus.mr import MeaningRepresentation
from d2tnlg.rerank import rerank, score
from d2tnlg.templates import classify, lexicon_product, realize

mr = MeaningRepresentation.e2e({"name": "NAME", "eatType": "coffee shop", "familyFriendly": "yes",
                                "food": "Chinese", "priceRange": "low", "customerRating": "high",
                                "area": "city centre", "near": "NEAR"})
for t in ("T1", "T2"):
    text = realize(t, mr)
    print(t, "|", text, "|", classify(text).label.value)

mixed = ("NAME is a restaurant which serves English food in the moderate price range. "
         "It is located in the city centre area, near NEAR. It has a customer rating of 1 out of 5.")
print(classify(mixed))

# how many MRs does the shipped lexicon span?
print(sum(1 for _ in lexicon_product()), "MRs in the lexicon product")

# an n-best list where the model prefers a wrong food
small = MeaningRepresentation.e2e({"name": "NAME", "eatType": "pub", "food": "English"})
nbest = ["NAME is a pub which serves italian food.",
         "NAME is a pub.",
         "NAME is a pub which serves english food."]
for h in nbest:
    print(score(small, h), h)
print(rerank(small, nbest))
