"""
İsimli rastgele sayı akışları.

Her tüketici (ağaç i, örnekleyici slotu, sıralayıcı etiketi, epoch ...)
ana tohumdan ve kendi isim yolundan türetilen bağımsız bir Generator alır;
böylece sonuçlar işçi sayısından bağımsızdır.
"""

import hashlib
from typing import Union

import numpy as np

NamePart = Union[str, int, float]


def stream_seed(master_seed: int, *names: NamePart) -> np.random.SeedSequence:
    """İsim yolu için SeedSequence üret"""
    key = "/".join([str(int(master_seed))] + [str(n) for n in names])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    words = np.frombuffer(digest, dtype="<u4").astype(np.uint64)
    return np.random.SeedSequence([int(w) for w in words])


def stream(master_seed: int, *names: NamePart) -> np.random.Generator:
    """
    İsimli akış için Generator döndür.

    Args:
        master_seed: Ana tohum
        names: Akış yolu (ör. "forest", 17)

    Returns:
        np.random.Generator: Bağımsız PCG64 üreteci
    """
    return np.random.Generator(np.random.PCG64(stream_seed(master_seed, *names)))


def derive_seed(master_seed: int, *names: NamePart) -> int:
    """Alt bileşenlere geçirilecek 63-bit tam sayı tohum"""
    return int(stream_seed(master_seed, *names).generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
