#pragma once
// Toy grammars shared by the parser and acceptance suites.

namespace fixtures {

// Twelve rules over an agreement-flavored fragment. Mothers embed their
// daughters (HEAD / OBJ / MOD / ...), so distinct derivations always build
// distinct mother structures and edge deduplication never conflates genuine
// ambiguity. All priorities stay at the default 1.0 and all atoms are
// singletons, which keeps the fragment inside classical unification.
inline const char* kAgreeGrammar = R"(
:start s
:rule s_plain: [CAT: {s}  SUBJ: #1  PRED: #2] ->
    #1 [CAT: {np}  NUM: #3]  #2 [CAT: {vp}  NUM: #3]
:rule s_conj: [CAT: {s}  LEFT: #1  RIGHT: #2] ->
    #1 [CAT: {s}]  [CAT: {cnj}]  #2 [CAT: {s}]
:rule np_det: [CAT: {np}  NUM: #3  DET: {+}  HEAD: #1] ->
    [CAT: {det}]  #1 [CAT: {n}  NUM: #3]
:rule np_det_pp: [CAT: {np}  NUM: #3  DET: {+}  HEAD: #1  MOD: #2] ->
    [CAT: {det}]  #1 [CAT: {n}  NUM: #3]  #2 [CAT: {pp}]
:rule np_pn: [CAT: {np}  NUM: #3  HEAD: #1] -> #1 [CAT: {pn}  NUM: #3]
:rule np_bare: [CAT: {np}  NUM: #3  HEAD: #1] -> #1 [CAT: {n}  NUM: #3  BARE: {+}]
:rule np_conj: [CAT: {np}  NUM: {pl}  LEFT: #1  RIGHT: #2] ->
    #1 [CAT: {np}]  [CAT: {cnj}]  #2 [CAT: {np}]
:rule vp_plain: [CAT: {vp}  NUM: #3  HEAD: #1] -> #1 [CAT: {v}  NUM: #3  TRANS: {-}]
:rule vp_np: [CAT: {vp}  NUM: #3  HEAD: #1  OBJ: #2] ->
    #1 [CAT: {v}  NUM: #3  TRANS: {+}]  #2 [CAT: {np}]
:rule vp_np_pp: [CAT: {vp}  NUM: #3  HEAD: #1  OBJ: #2  MOD: #4] ->
    #1 [CAT: {v}  NUM: #3  TRANS: {+}]  #2 [CAT: {np}]  #4 [CAT: {pp}]
:rule vp_pp: [CAT: {vp}  NUM: #3  HEAD: #1  MOD: #4] ->
    #1 [CAT: {v}  NUM: #3]  #4 [CAT: {pp}]
:rule pp_p: [CAT: {pp}  POBJ: #1] -> [CAT: {p}]  #1 [CAT: {np}]
)";

inline const char* kAgreeLexicon = R"(
the    [CAT: {det}]
a      [CAT: {det}]
dog    [CAT: {n}  NUM: {sg}  BARE: {-}]
dogs   [CAT: {n}  NUM: {pl}  BARE: {+}]
sheep  [CAT: {n}  NUM: {sg}  BARE: {+}]
sheep  [CAT: {n}  NUM: {pl}  BARE: {+}]
fido   [CAT: {pn}  NUM: {sg}]
they   [CAT: {pn}  NUM: {pl}]
barks  [CAT: {v}  NUM: {sg}  TRANS: {-}]
bark   [CAT: {v}  NUM: {pl}  TRANS: {-}]
sees   [CAT: {v}  NUM: {sg}  TRANS: {+}]
see    [CAT: {v}  NUM: {pl}  TRANS: {+}]
walks  [CAT: {v}  NUM: {sg}]
with   [CAT: {p}]
near   [CAT: {p}]
and    [CAT: {cnj}]
)";

// Category-only fragment with a genuine PP-attachment ambiguity. With no
// features beyond CAT, every cross-category unification scores exactly 0,
// so even a near-zero unification threshold reproduces classical behavior.
// The high-priority CAT arcs make category clashes nearly fatal (at most
// 3/11) while an agreement clash costs exactly 1/9, so sentences like
// "the dog bark" parse at permissive thresholds and die at strict ones.
// Without the weighting, a completed constituent's many embedded paths
// would let cross-category junk score arbitrarily close to 1.
inline const char* kSoftGrammar = R"(
:start s
:rule s_nv: [CAT: {s} !8] -> [CAT: {np} !8  NUM: #1]  [CAT: {v} !8  NUM: #1]
:rule np_d: [CAT: {np} !8  NUM: #1] -> [CAT: {det} !8]  [CAT: {n} !8  NUM: #1]
)";

inline const char* kSoftLexicon = R"(
the   [CAT: {det} !8]
dog   [CAT: {n} !8  NUM: {sg}]
dogs  [CAT: {n} !8  NUM: {pl}]
barks [CAT: {v} !8  NUM: {sg}]
bark  [CAT: {v} !8  NUM: {pl}]
)";

inline const char* kPpGrammar = R"(
:start s
:rule s_main:    s  -> np vp
:rule np_pn:     np -> pn
:rule np_det:    np -> det n
:rule np_det_pp: np -> det n pp
:rule vp_np:     vp -> v np
:rule vp_np_pp:  vp -> v np pp
:rule pp_p:      pp -> p np
)";

inline const char* kPpLexicon = R"(
i     [CAT: {pn}]
saw   [CAT: {v}]
the   [CAT: {det}]
man   [CAT: {n}]
scope [CAT: {n}]
with  [CAT: {p}]
)";

// Minimal unambiguous fragment.
inline const char* kTinyGrammar = R"(
:start s
:rule s_main: s -> np v
:rule np_det: np -> det n
)";

inline const char* kTinyLexicon = R"(
the  [CAT: {det}]
van  [CAT: {n}]
left [CAT: {v}]
)";

// Left-recursive on purpose: x_grow predicts itself forever unless the
// chart deduplicates.
inline const char* kLoopGrammar = R"(
:start x
:rule x_grow: x -> x y
:rule x_leaf: x -> y
)";

inline const char* kLoopLexicon = R"(
b [CAT: {y}]
)";

}  // namespace fixtures
