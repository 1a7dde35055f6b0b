#!/usr/bin/env python3
"""Writes the synthetic sample corpus used by the bundled config.

The corpus imitates a PubMed export on childhood speech and language
disorders: 1,000 English child-related abstracts across 14 themes, plus
non-English and adult-only records that curation removes. Output is fully
determined by --seed.
"""
import argparse
import csv
import random

THEMES = {
    "language": ["developmental language disorder", "grammar", "morphology", "vocabulary", "narrative",
                 "sentence repetition", "expressive language", "receptive language", "syntax", "verb",
                 "late talkers", "language intervention", "nonword repetition", "comprehension"],
    "attention": ["attention deficit", "hyperactivity", "impulsivity", "inattention", "stimulant",
                  "methylphenidate", "executive function", "working memory", "inhibition", "behavior rating",
                  "teacher ratings", "symptom severity", "comorbid", "medication"],
    "stuttering": ["stuttering", "stammering", "disfluency", "fluency", "syllable repetition",
                   "blocks", "prolongations", "lidcombe program", "stuttering severity", "onset",
                   "recovery", "speech rate", "fluency shaping", "persistence"],
    "temperament": ["temperament", "emotional reactivity", "emotion regulation", "behavioral inhibition",
                    "negative affect", "effortful control", "shyness", "tempering", "anxiety",
                    "emotional", "reactivity", "surgency", "self regulation", "physiological arousal"],
    "parents": ["parental stress", "caregiver burden", "parenting", "mothers", "fathers", "family functioning",
                "coping", "parent training", "quality life", "parent reported", "support groups", "wellbeing",
                "family", "depression"],
    "autism": ["autism spectrum", "social communication", "joint attention", "repetitive behaviors",
               "minimally verbal", "augmentative communication", "echolalia", "pragmatic", "eye gaze",
               "diagnostic assessment", "sensory", "autistic", "social interaction", "gesture"],
    "hearing": ["hearing loss", "cochlear implant", "auditory", "hearing aids", "newborn hearing screening",
                "deaf", "sign language", "speech perception", "audiology", "implantation",
                "auditory verbal", "otitis media", "listening", "acoustic"],
    "apraxia": ["apraxia", "motor speech", "speech sound disorder", "articulation", "phonological",
                "dysarthria", "intelligibility", "motor planning", "consonant", "vowel", "prosody",
                "oral motor", "speech errors", "phonetic"],
    "internet": ["internet addiction", "screen time", "smartphone", "gaming", "social media", "digital devices",
                 "online", "problematic use", "television", "media exposure", "sleep", "video",
                 "technology", "addiction"],
    "bonding": ["maternal infant bonding", "attachment", "mother infant interaction", "postpartum",
                "breastfeeding", "maternal sensitivity", "dyadic", "perinatal", "caregiving", "newborn",
                "skin contact", "maternal depression", "bonding", "responsiveness"],
    "emergency": ["pediatric emergency", "emergency department", "triage", "acute care", "resuscitation",
                  "trauma", "admissions", "clinicians", "hospital", "injury", "emergency care", "visits",
                  "intensive care", "urgent"],
    "epilepsy": ["epilepsy", "seizures", "antiepileptic", "electroencephalography", "epileptic",
                 "landau kleffner", "aphasia", "seizure control", "neurological", "drug resistant",
                 "spikes", "encephalopathy", "febrile seizures", "neurology"],
    "bilingual": ["bilingual", "multilingual", "second language", "dual language", "language exposure",
                  "heritage language", "code switching", "monolingual", "cultural", "immigrant families",
                  "language dominance", "translation", "minority language", "cross linguistic"],
    "reading": ["dyslexia", "reading", "literacy", "phonological awareness", "spelling", "decoding",
                "reading comprehension", "letter knowledge", "orthographic", "rapid naming",
                "reading intervention", "written language", "fluent reading", "print"],
}

GENERIC = ["assessment", "outcomes", "sample", "participants", "clinical", "evidence", "scores", "measures",
           "cohort", "longitudinal", "treatment", "therapy", "speech", "language", "development",
           "associated", "significant", "compared", "findings", "analysis", "factors", "risk",
           "intervention", "group", "controls", "follow", "months", "years", "effects", "trial"]

CHILD_WORDS = ["children", "child", "infants", "toddlers", "preschool children", "adolescents",
               "pediatric patients", "school aged children", "childhood"]
CHILD_STEMS = ("child", "infant", "toddler", "pediatric", "paediatric", "adolescent", "preschool")
ADULT_WORDS = ["adults", "older adults", "adult patients", "elderly", "middle aged", "young adults",
               "veterans", "university students"]

TEMPLATES = [
    "We examined {a} and {b} in {who} with {c}.",
    "The {a} of {who} was associated with {b} and {c}.",
    "{A} scores differed between groups, with {b} predicting {c} in {who}.",
    "This study reports {a}, {b} and {c} outcomes among {who}.",
    "Findings indicate that {a} influences {b} in {who}, particularly for {c}.",
    "Clinical {a} should consider {b} when evaluating {c} in {who}.",
    "A longitudinal cohort of {who} showed changes in {a} and {b}.",
    "Measures of {a} correlated with {b} and with {c}.",
]

FIRST = ["Anna", "Ben", "Carla", "David", "Elif", "Farid", "Grace", "Hiro", "Ines", "Jonas", "Kemal", "Lena",
         "Maya", "Nils", "Olga", "Pedro", "Qing", "Rosa", "Sven", "Tara", "Umar", "Vera", "Wei", "Yara"]
LAST = ["Smith", "Garcia", "Muller", "Rossi", "Kim", "Nguyen", "Silva", "Kowalski", "Tanaka", "Okafor",
        "Jensen", "Novak", "Haddad", "Berg", "Costa", "Ivanova", "Moreau", "Sato", "Laine", "Duarte"]
JOURNALS = ["J Speech Lang Hear Res", "Int J Lang Commun Disord", "J Fluency Disord", "Child Dev",
            "J Child Psychol Psychiatry", "Pediatrics", "Am J Speech Lang Pathol", "J Commun Disord",
            "Front Psychol", "BMC Pediatr", "Dev Med Child Neurol", "Lang Speech Hear Serv Sch"]
FOREIGN = {
    "fre": ("Etude du langage chez", "Les resultats montrent une association entre"),
    "ger": ("Untersuchung der Sprache bei", "Die Ergebnisse zeigen einen Zusammenhang zwischen"),
    "spa": ("Estudio del lenguaje en", "Los resultados muestran una asociacion entre"),
    "por": ("Estudo da linguagem em", "Os resultados mostram uma associacao entre"),
    "jpn": ("Gengo hattatsu no kenkyu", "Kekka wa kanren o shimeshita"),
}


def sentence(rng, theme_words, who):
    words = [rng.choice(theme_words) if rng.random() < 0.7 else rng.choice(GENERIC) for _ in range(3)]
    text = rng.choice(TEMPLATES).format(a=words[0], A=words[0].capitalize(), b=words[1], c=words[2], who=who)
    return text[0].upper() + text[1:]


def abstract(rng, theme, who_words):
    words = THEMES[theme]
    return " ".join(sentence(rng, words, rng.choice(who_words)) for _ in range(rng.randint(6, 9)))


def title(rng, theme, who_words):
    a, b = rng.sample(THEMES[theme], 2)
    return f"{a.capitalize()} and {b} in {rng.choice(who_words)}"


def authors(rng):
    return "; ".join(f"{rng.choice(FIRST)} {rng.choice(LAST)}" for _ in range(rng.randint(1, 5)))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="raw corpus CSV to write")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--english-child", type=int, default=1000)
    parser.add_argument("--non-english", type=int, default=70)
    parser.add_argument("--adult-only", type=int, default=50)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    themes = sorted(THEMES)
    rows = []
    for i in range(args.english_child):
        theme = themes[i % len(themes)]
        lang = "eng" if rng.random() < 0.97 else ""
        rows.append((title(rng, theme, CHILD_WORDS), abstract(rng, theme, CHILD_WORDS), lang))
    adult_themes = [t for t in themes
                    if not any(w.startswith(s) for p in THEMES[t] for w in p.split() for s in CHILD_STEMS)]
    for i in range(args.adult_only):
        theme = rng.choice(adult_themes)
        rows.append((title(rng, theme, ADULT_WORDS), abstract(rng, theme, ADULT_WORDS), "eng"))
    for i in range(args.non_english):
        lang = rng.choice(sorted(FOREIGN))
        lead, body = FOREIGN[lang]
        theme = rng.choice(themes)
        a, b = rng.sample(THEMES[theme], 2)
        rows.append((f"{lead} {rng.choice(CHILD_WORDS)}", f"{body} {a} et {b}. " + abstract(rng, theme, CHILD_WORDS),
                     lang))
    rng.shuffle(rows)

    with open(args.out, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["pmid", "title", "authors", "year", "journal", "abstract", "doi", "language"])
        for i, (t, abs_, lang) in enumerate(rows):
            pmid = 30000000 + 37 * i
            year = rng.randint(2015, 2025)
            doi = f"10.5555/sample.{pmid}" if rng.random() < 0.9 else ""
            writer.writerow([pmid, t, authors(rng), year, rng.choice(JOURNALS), abs_, doi, lang])


if __name__ == "__main__":
    main()
