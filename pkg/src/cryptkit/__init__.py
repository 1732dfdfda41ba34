"""cryptkit: cryptanalysis and computational-algebra toolkit.

Modules:
    numtheory  - exact modular arithmetic, CRT, Moebius, primality, cubics
    gf2n       - GF(2^n) arithmetic, trace, subfield-excluded counting
    classical  - Polybius, wallet, quadratic cipher, prime cubic, pin, Hill
    rfdecoder  - rational-function interpolation with errors over Z_2022
    feistel    - generalized-Feistel differential set analysis
    sbox       - essential-dependence counting for permutations
    qsim       - small state-vector simulator with post-selection
    protocols  - three-pass exchanges and key-chain e-coin schemes
    cli        - unified command-line front end
"""

__version__ = "0.1.0"
