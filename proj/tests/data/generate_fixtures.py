#!/usr/bin/env python3
# Copyright 2026 The Galactic Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the small toy treebanks under tests/data.

en  SVO, DET ADJ NOUN, prepositions, relative clauses after the noun.
fr  SVO, DET NOUN ADJ (mostly), prepositions.
hi  SOV and verb-final, DET ADJ NOUN, postpositions.

Output is deterministic; rerun after editing and commit the .conllu files.
"""

import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))


class Node:
    def __init__(self, form, upos, deprel="_"):
        self.form, self.upos, self.deprel = form, upos, deprel
        self.left, self.right = [], []


def linearize(node, out):
    for c in node.left:
        linearize(c, out)
    out.append(node)
    for c in node.right:
        linearize(c, out)


def to_conllu(root, sent_id, text_comment=True):
    nodes = []
    linearize(root, nodes)
    index = {id(n): i + 1 for i, n in enumerate(nodes)}
    heads = {}

    def walk(n, h):
        heads[id(n)] = h
        for c in n.left + n.right:
            walk(c, index[id(n)])

    walk(root, 0)
    root.deprel = "root"
    lines = ["# sent_id = " + sent_id]
    if text_comment:
        lines.append("# text = " + " ".join(n.form for n in nodes))
    for n in nodes:
        lines.append("\t".join([str(index[id(n)]), n.form, n.form.lower(), n.upos,
                                "_", "_", str(heads[id(n)]), n.deprel, "_", "_"]))
    return "\n".join(lines) + "\n"


LEX = {
    "en": dict(
        noun="move future dog company city book idea student teacher house market letter".split(),
        propn="Google Paris Mary John".split(),
        pron="he she it they".split(),
        verb="brings makes sees likes builds reads finds wants sends opens".split(),
        adj="particular big small new old red".split(),
        adv="closer quickly often today".split(),
        det="the a this every".split(),
        adp="in on with near".split(),
    ),
    "fr": dict(
        noun="maison livre ville chien idee avenir marche lettre".split(),
        propn="Paris Marie Jean Lyon".split(),
        pron="il elle on".split(),
        verb="voit aime construit lit trouve veut envoie ouvre".split(),
        adj="rouge nouveau grand petit particulier ancien".split(),
        adv="souvent vite hier".split(),
        det="le la un une ce".split(),
        adp="dans sur avec pres".split(),
    ),
    "hi": dict(
        noun="ghar kitab shahar kutta vichar bazaar patr chhatra".split(),
        propn="Dilli Ram Sita Mumbai".split(),
        pron="vah ve main".split(),
        verb="dekhta padhta banata bhejta kholta chahta".split(),
        adj="bada chhota naya purana lal".split(),
        adv="jaldi aksar aaj".split(),
        det="yah vah ek".split(),
        adp="mein par se ko ne".split(),
        aux="hai tha".split(),
    ),
}


class Grammar:
    def __init__(self, lang, rng):
        self.lang, self.rng, self.lex = lang, rng, LEX[lang]

    def pick(self, cat):
        return self.rng.choice(self.lex[cat])

    def noun_phrase(self, rel, allow_clause=True, case=None):
        r = self.rng
        kind = r.random()
        if kind < 0.15:
            head = Node(self.pick("pron"), "PRON", rel)
            return self.attach_case(head, case)
        if kind < 0.3:
            head = Node(self.pick("propn"), "PROPN", rel)
            return self.attach_case(head, case)
        head = Node(self.pick("noun"), "NOUN", rel)
        if r.random() < 0.8:
            head.left.append(Node(self.pick("det"), "DET", "det"))
        for _ in range(r.choice([0, 0, 1, 1, 2])):
            adj = Node(self.pick("adj"), "ADJ", "amod")
            post = self.lang == "fr" and r.random() < 0.85
            (head.right if post else head.left).append(adj)
        if allow_clause and r.random() < 0.15:
            head.right.append(self.relative_clause())
        if allow_clause and r.random() < 0.12:
            pp = self.noun_phrase("nmod", allow_clause=False, case="adp")
            if self.lang == "hi":
                head.left.insert(0, pp)
            else:
                head.right.append(pp)
        return self.attach_case(head, case)

    def attach_case(self, head, case):
        if case is None:
            return head
        form = case if case != "adp" else self.pick("adp")
        marker = Node(form, "ADP", "case")
        if self.lang == "hi":
            head.right.append(marker)
        else:
            head.left.insert(0, marker)
        return head

    def relative_clause(self):
        verb = Node(self.pick("verb"), "VERB", "acl:relcl")
        subj = self.noun_phrase("nsubj", allow_clause=False)
        verb.left.append(subj)
        return verb

    def clause(self):
        r = self.rng
        verb = Node(self.pick("verb"), "VERB", "root")
        hi = self.lang == "hi"
        subj = self.noun_phrase("nsubj", case="ne" if hi and r.random() < 0.5 else None)
        obj = self.noun_phrase("dobj", case="ko" if hi and r.random() < 0.4 else None) \
            if r.random() < 0.85 else None
        adv = Node(self.pick("adv"), "ADV", "advmod") if r.random() < 0.5 else None
        pp = self.noun_phrase("nmod", allow_clause=False, case="adp") if r.random() < 0.3 else None
        if hi:
            args = [subj] + ([obj] if obj else [])
            if obj and r.random() < 0.1:
                args.reverse()
            if adv:
                args.insert(r.choice([0, 1, len(args)]), adv)
            if pp:
                args.insert(r.randrange(len(args) + 1), pp)
            verb.left.extend(args)
            if r.random() < 0.6:
                verb.right.append(Node(self.pick("aux"), "AUX", "aux"))
        else:
            verb.left.append(subj)
            if adv and r.random() < 0.25:
                verb.left.insert(0, adv)
                adv = None
            if obj:
                verb.right.append(obj)
            if pp:
                verb.right.append(pp)
            if adv:
                verb.right.append(adv)
        verb.right.append(Node(".", "PUNCT", "punct"))
        return verb


EXAMPLE = """# sent_id = example
# text = Every move Google makes brings this particular future closer .
1\tEvery\tevery\tDET\t_\t_\t2\tdet\t_\t_
2\tmove\tmove\tNOUN\t_\t_\t5\tnsubj\t_\t_
3\tGoogle\tGoogle\tPROPN\t_\t_\t4\tnsubj\t_\t_
4\tmakes\tmake\tVERB\t_\t_\t2\tacl:rel\t_\t_
5\tbrings\tbring\tVERB\t_\t_\t0\troot\t_\t_
6\tthis\tthis\tDET\t_\t_\t8\tdet\t_\t_
7\tparticular\tparticular\tADJ\t_\t_\t8\tamod\t_\t_
8\tfuture\tfuture\tNOUN\t_\t_\t5\tdobj\t_\t_
9\tcloser\tcloser\tADV\t_\t_\t5\tadvmod\t_\t_
10\t.\t.\tPUNCT\t_\t_\t5\tpunct\t_\t_
"""

# "A hearing is scheduled on the issue today ." (nmod arc crosses the verb)
NONPROJECTIVE = """# sent_id = {sid}
1\tA\ta\tDET\t_\t_\t2\tdet\t_\t_
2\thearing\thearing\tNOUN\t_\t_\t4\tnsubjpass\t_\t_
3\tis\tbe\tAUX\t_\t_\t4\tauxpass\t_\t_
4\tscheduled\tschedule\tVERB\t_\t_\t0\troot\t_\t_
5\ton\ton\tADP\t_\t_\t7\tcase\t_\t_
6\tthe\tthe\tDET\t_\t_\t7\tdet\t_\t_
7\tissue\tissue\tNOUN\t_\t_\t2\tnmod\t_\t_
8\ttoday\ttoday\tNOUN\t_\t_\t4\tnmod:tmod\t_\t_
9\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
"""

# "gave" has seven dependents (n = 8).
HIGH_FANOUT = """# sent_id = {sid}
1\tYesterday\tyesterday\tNOUN\t_\t_\t4\tnmod:tmod\t_\t_
2\tJohn\tJohn\tPROPN\t_\t_\t4\tnsubj\t_\t_
3\tquickly\tquickly\tADV\t_\t_\t4\tadvmod\t_\t_
4\tgave\tgive\tVERB\t_\t_\t0\troot\t_\t_
5\tMary\tMary\tPROPN\t_\t_\t4\tiobj\t_\t_
6\tthe\tthe\tDET\t_\t_\t7\tdet\t_\t_
7\tbook\tbook\tNOUN\t_\t_\t4\tdobj\t_\t_
8\tin\tin\tADP\t_\t_\t9\tcase\t_\t_
9\tParis\tParis\tPROPN\t_\t_\t4\tnmod\t_\t_
10\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
"""

MULTIWORD = """# sent_id = {sid}
# text = They don't see it .
1\tThey\tthey\tPRON\t_\t_\t4\tnsubj\t_\t_
2-3\tdon't\t_\t_\t_\t_\t_\t_\t_\t_
2\tdo\tdo\tAUX\t_\t_\t4\taux\t_\t_
3\tn't\tnot\tPART\t_\t_\t4\tneg\t_\t_
4\tsee\tsee\tVERB\t_\t_\t0\troot\t_\t_
5\tit\tit\tPRON\t_\t_\t4\tdobj\t_\t_
6\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_
"""


def write(path, blocks):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for b in blocks:
            f.write(b + "\n")


def generate(lang, split, count, seed, extras=()):
    rng = random.Random(seed)
    g = Grammar(lang, rng)
    blocks = []
    for i in range(count - len(extras)):
        blocks.append(to_conllu(g.clause(), "%s-%s-%03d" % (lang, split, i + 1)))
    for pos, template in extras:
        blocks.insert(pos, template.format(sid="%s-%s-x%02d" % (lang, split, pos)))
    return blocks


def main():
    for lang, sizes in {"en": (50, 20, 20), "fr": (200, 30, 30), "hi": (200, 30, 30)}.items():
        os.makedirs(os.path.join(HERE, lang), exist_ok=True)
        for k, (split, count) in enumerate(zip(("train", "dev", "test"), sizes)):
            extras = ()
            if lang == "en" and split == "train":
                extras = ((7, NONPROJECTIVE), (23, HIGH_FANOUT), (41, NONPROJECTIVE))
            if lang == "en" and split == "test":
                extras = ((5, MULTIWORD),)
            seed = 1000 * (1 + list(LEX).index(lang)) + k
            write(os.path.join(HERE, lang, "%s-ud-%s.conllu" % (lang, split)),
                  generate(lang, split, count, seed, extras))
    write(os.path.join(HERE, "example.conllu"), [EXAMPLE])


if __name__ == "__main__":
    main()
