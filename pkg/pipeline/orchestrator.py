"""
Pipeline Orchestrator - Vaka başına son işleme akışı

Aşamalar (sırayla, her biri toggle ile atlanabilir):
- Ön işleme (HU → normalized-8bit)
- Eşikleme (hacim başına Otsu veya sabit eşik)
- Morfolojik yumuşatma
- Kesitler arası (temporal) iyileştirme
- Aday bölge çıkarımı
- Radyomik yanlış pozitif filtresi
- CNN ile sınır bandı iyileştirmesi
- Metrikler (referans maske varsa)

Her aşamanın süresi ve ara maske istatistikleri çalışma manifestosuna yazılır.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ensemble.suppressor import apply_suppression, suppress_false_positives
from evalmetrics.metrics import MetricsRow, compute_metrics
from evalmetrics.report import write_report
from evalmetrics.strata import stratified_lesion_dice
from models.region import CandidateRegion
from models.schemas import PipelineConfig
from models.volume import Mask3D, ProbMap3D, ValueKind, Volume3D
from neural.band import CnnVoxelClassifier, refine_labels
from phantom.generator import Phantom
from pipeline.manifest import RunManifest, StageRecord, mask_stats
from pipeline.training import TrainedModels
from postproc.morphology import morph_smooth
from postproc.otsu import binarize_with_result
from postproc.temporal import temporal_refine
from radiomics.candidates import extract_candidate_regions
from radiomics.extractor import FeatureExtractor
from utils.exceptions import ConfigError, StageError
from volumes.io import load_volume, save_volume
from volumes.preprocessing import clip_rescale_hu

logger = logging.getLogger(__name__)

STAGES = (
    "preprocess",
    "binarize",
    "morph",
    "temporal",
    "candidates",
    "radiomics_filter",
    "cnn_refine",
    "metrics",
)
MASK_SUFFIX = ".mha"


@dataclass(frozen=True)
class CaseInputs:
    """Tek vakanın girdileri; ct HU veya normalized-8bit olabilir"""

    case_id: str
    ct: Volume3D
    p_tumor: ProbMap3D
    p_liver: Optional[ProbMap3D] = None
    liver_gt: Optional[Mask3D] = None
    tumor_gt: Optional[Mask3D] = None


def case_from_phantom(phantom: Phantom, case_id: str) -> CaseInputs:
    return CaseInputs(
        case_id=case_id,
        ct=phantom.ct,
        p_tumor=phantom.p_tumor,
        p_liver=phantom.p_liver,
        liver_gt=phantom.liver,
        tumor_gt=phantom.tumor,
    )


def load_case(config: PipelineConfig, case_id: str = "case") -> CaseInputs:
    """Konfigürasyondaki yollardan vaka girdilerini oku"""
    paths = config.paths
    if paths.ct is None or paths.p_tumor is None:
        raise ConfigError("pipeline için paths.ct ve paths.p_tumor gerekli")
    return CaseInputs(
        case_id=case_id,
        ct=load_volume(paths.ct),
        p_tumor=load_volume(paths.p_tumor, "prob"),
        p_liver=load_volume(paths.p_liver, "prob") if paths.p_liver else None,
        liver_gt=load_volume(paths.liver_gt, "mask") if paths.liver_gt else None,
        tumor_gt=load_volume(paths.tumor_gt, "mask") if paths.tumor_gt else None,
    )


@dataclass
class CaseResult:
    case_id: str
    mask: Mask3D
    manifest: RunManifest
    intermediates: Dict[str, Mask3D] = field(default_factory=dict)
    metrics: Optional[MetricsRow] = None
    strata: Dict[str, Any] = field(default_factory=dict)
    candidate_stats: Dict[str, int] = field(default_factory=dict)

    def dice(self) -> float:
        return float("nan") if self.metrics is None else self.metrics.dice


class PipelineOrchestrator:
    """Vaka başına aşama çalıştırıcı"""

    def __init__(
        self,
        config: PipelineConfig,
        models: Optional[TrainedModels] = None,
        output_dir: Optional[Path] = None,
    ):
        """
        Args:
            config: Pipeline konfigürasyonu
            models: Eğitilmiş modeller (None: config.paths'ten yüklenir)
            output_dir: Çıktı dizini (None: çıktı yazılmaz)
        """
        self.config = config
        self.models = models if models is not None else TrainedModels.load(config)
        self.output_dir = Path(output_dir) if output_dir is not None else None
        self.preflight()

        # Vaka durumu
        self.case: Optional[CaseInputs] = None
        self.volume: Optional[Volume3D] = None
        self.mask: Optional[Mask3D] = None
        self.regions: List[CandidateRegion] = []
        self.result: Optional[CaseResult] = None

    # ========== 0. ÖN KONTROL ==========

    def preflight(self) -> None:
        """0.1. Açık aşamaların ihtiyaç duyduğu modeller mevcut mu?"""
        toggles = self.config.toggles
        missing = []
        if toggles.radiomics_filter:
            if self.models.featsel is None:
                missing.append("featsel_model")
            if self.models.forest is None:
                missing.append("forest_model")
        if toggles.cnn_refine and self.models.cnn is None:
            missing.append("cnn_model")
        if missing:
            raise ConfigError(f"Açık aşamalar için model eksik: {', '.join(missing)}")
        if toggles.cnn_refine and self.models.cnn.patch_size != self.config.cnn.patch_size:
            raise ConfigError(
                f"CNN yama boyutu {self.models.cnn.patch_size}, konfigürasyon {self.config.cnn.patch_size}"
            )

    def enabled(self, stage: str) -> bool:
        toggles = self.config.toggles
        if stage == "candidates":
            return toggles.radiomics_filter
        if stage == "metrics":
            return self.case is not None and self.case.tumor_gt is not None
        return getattr(toggles, stage, True)

    # ========== 1. AŞAMA ÇALIŞTIRICI ==========

    def run(self, case: CaseInputs) -> CaseResult:
        """
        Vakayı tüm aşamalardan geçir.

        Args:
            case: Vaka girdileri

        Returns:
            CaseResult

        Raises:
            StageError: Herhangi bir aşama başarısız olursa (kısmi çıktılar yazılır)
        """
        self.case = case
        self.volume = None
        self.mask = None
        self.regions = []
        self.result = CaseResult(
            case_id=case.case_id,
            mask=Mask3D.empty_like(case.p_tumor),
            manifest=RunManifest.for_config(case.case_id, self.config),
        )
        logger.info(f"{'=' * 60}\nVaka işleniyor: {case.case_id}\n{'=' * 60}")

        for stage in STAGES:
            if not self.enabled(stage):
                self.result.manifest.record(StageRecord(stage, "skipped"))
                logger.debug(f"[{stage}] atlandı")
                continue
            self._run_stage(stage, getattr(self, f"stage_{stage}"))

        self.result.mask = self.mask
        self.result.manifest.finish()
        self.write_outputs()
        logger.info(f"Vaka tamamlandı: {case.case_id}")
        return self.result

    def _run_stage(self, stage: str, fn: Callable[[], Dict[str, Any]]) -> None:
        """1.1. Süre ölç, istatistik kaydet, hata durumunda kısmi çıktıyı yaz"""
        started = time.perf_counter()
        try:
            stats = fn() or {}
        except Exception as exc:
            seconds = time.perf_counter() - started
            logger.error(f"[{stage}] aşaması başarısız: {exc}", exc_info=True)
            self.result.manifest.record(StageRecord(stage, "failed", seconds, error=f"{type(exc).__name__}: {exc}"))
            self.result.manifest.finish()
            self.write_outputs(partial=True)
            raise StageError(stage, exc) from exc
        seconds = time.perf_counter() - started
        if self.mask is not None and stage not in ("preprocess", "metrics"):
            self.result.intermediates[stage] = self.mask
            stats = {**mask_stats(self.mask), **stats}
        self.result.manifest.record(StageRecord(stage, "ok", round(seconds, 6), stats))
        logger.info(f"[{stage}] {seconds:.2f} sn {stats.get('foreground', '')}")

    # ========== 2. ÖN İŞLEME VE EŞİKLEME ==========

    def stage_preprocess(self) -> Dict[str, Any]:
        """2.1. HU hacmini normalize et (zaten normalize ise olduğu gibi)"""
        ct = self.case.ct
        ct.check_grid(self.case.p_tumor, "tümör olasılık haritası")
        self.volume = ct if ct.value_kind is ValueKind.NORMALIZED_8BIT else clip_rescale_hu(ct)
        return {"value_kind": ct.value_kind.value}

    def stage_binarize(self) -> Dict[str, Any]:
        """2.2. Olasılık haritasını eşikle"""
        postproc = self.config.postproc
        self.mask, otsu = binarize_with_result(self.case.p_tumor, postproc.otsu_mode, postproc.fixed_tau)
        tau = otsu.tau_star if otsu is not None else postproc.fixed_tau
        return {"tau": int(tau), "mode": postproc.otsu_mode}

    # ========== 3. MORFOLOJİ VE KESİTLER ARASI ==========

    def stage_morph(self) -> Dict[str, Any]:
        self.mask = morph_smooth(self.mask)
        return {}

    def stage_temporal(self) -> Dict[str, Any]:
        postproc = self.config.postproc
        before = self.mask.count
        self.mask = temporal_refine(
            self.mask, self.case.p_tumor, postproc.suppress_isolated, postproc.restore_threshold,
        )
        return {"changed": int(self.mask.count - before)}

    # ========== 4. RADYOMİK FİLTRE ==========

    def stage_candidates(self) -> Dict[str, Any]:
        """4.1. Eşiklenmiş maskenin 26-bağlı bileşenleri aday bölgelerdir"""
        self.regions = extract_candidate_regions(self.mask)
        return {"candidates": len(self.regions)}

    def stage_radiomics_filter(self) -> Dict[str, Any]:
        """4.2. Seçili özelliklerle orman skoru; q < τ_rf olan bölgeleri sil"""
        counts = {"candidates": len(self.regions), "kept": 0, "rejected": 0}
        if self.regions:
            extractor = FeatureExtractor(band_width=self.config.band_width)
            vectors = extractor.extract_many(self.regions, self.volume, workers=self.config.workers)
            X = np.vstack([v.values for v in vectors])
            featsel = self.models.featsel
            suppression = suppress_false_positives(
                self.regions,
                featsel.transform(X),
                self.models.forest,
                self.config.tau_rf,
                feature_names=featsel.selected_names,
            )
            self.mask = apply_suppression(self.mask, suppression.rejected)
            counts.update(kept=suppression.n_kept, rejected=suppression.n_rejected)
        self.result.candidate_stats = counts
        return dict(counts)

    # ========== 5. CNN SINIR İYİLEŞTİRMESİ ==========

    def stage_cnn_refine(self) -> Dict[str, Any]:
        cnn = self.config.cnn
        before = self.mask.data.copy()
        self.mask = refine_labels(
            self.mask, self.volume, CnnVoxelClassifier(self.models.cnn), cnn.d_max, cnn.patch_size,
        )
        return {"changed": int(np.count_nonzero(self.mask.data != before))}

    # ========== 6. METRİKLER ==========

    def stage_metrics(self) -> Dict[str, Any]:
        truth = self.case.tumor_gt
        row = compute_metrics(self.mask, truth, self.case.case_id)
        self.result.metrics = row
        self.result.strata = {
            name: vars(value).copy() for name, value in stratified_lesion_dice(self.mask, truth).items()
        }
        return {"dice": row.dice, "sensitivity": row.sensitivity, "ppv": row.ppv}

    # ========== 7. ÇIKTILAR ==========

    def case_dir(self) -> Optional[Path]:
        if self.output_dir is None:
            return None
        return self.output_dir / self.result.case_id

    def write_outputs(self, partial: bool = False) -> None:
        """7.1. Maske(ler) ve manifestoyu yaz; kısmi çalışmada son ara maske korunur"""
        directory = self.case_dir()
        if directory is None:
            return
        directory.mkdir(parents=True, exist_ok=True)
        try:
            if self.mask is not None:
                name = "partial_mask" if partial else "tumor_refined"
                path = save_volume(self.mask, directory / f"{name}{MASK_SUFFIX}")
                self.result.manifest.outputs[name] = str(path)
            for stage, mask in self.result.intermediates.items():
                path = save_volume(mask, directory / f"stage_{stage}{MASK_SUFFIX}")
                self.result.manifest.outputs[f"stage_{stage}"] = str(path)
            self.result.manifest.outputs["manifest"] = str(directory / "manifest.json")
        finally:
            self.result.manifest.save(directory / "manifest.json")


# =============================================================================
# KISAYOLLAR
# =============================================================================
def run_case(
    case: CaseInputs,
    config: PipelineConfig,
    models: Optional[TrainedModels] = None,
    output_dir: Optional[Path] = None,
) -> CaseResult:
    return PipelineOrchestrator(config, models, output_dir).run(case)


def run_pipeline(config: PipelineConfig, case_id: str = "case") -> CaseResult:
    """
    Konfigürasyondaki yollardan tek vaka çalıştır; rafine maske, rapor ve
    manifesto config.paths.output_dir altına yazılır.
    """
    case = load_case(config, case_id)
    output_dir = Path(config.paths.output_dir)
    result = run_case(case, config, output_dir=output_dir)
    if result.metrics is not None:
        write_report(
            [result.metrics],
            output_dir / case_id / "report.csv",
            extras={case_id: result.candidate_stats},
        )
    return result
