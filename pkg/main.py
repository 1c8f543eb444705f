"""
Ana uygulama entry point.

Kullanım:
    python main.py phantom --index 0 --out runs/phantom_000
    python main.py postproc --prob runs/phantom_000/p_tumor.mha --out runs/mask.mha
    python main.py features --case runs/phantom_000 --out runs/features.csv
    python main.py select --table runs/features.csv --out runs/featsel.json
    python main.py train-rf --table runs/features.csv --featsel runs/featsel.json --out runs/forest.json
    python main.py train-cnn --case runs/phantom_000 --case runs/phantom_001 --out runs/models
    python main.py pipeline --config config.json --set tau_rf=0.4 --no-cnn-refine

Çıkış kodları: 0 başarılı, 2 konfigürasyon hatası, 3 aşama hatası.
"""

import io
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click
import numpy as np

# Windows için UTF-8 encoding
if sys.platform == 'win32':
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding='utf-8')
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding='utf-8')

# Proje kök dizinini path'e ekle
sys.path.insert(0, str(Path(__file__).parent))

from config.runtime import runtime_settings
from config.settings import DEFAULT_SEED, EXIT_CONFIG_ERROR, EXIT_OK, EXIT_STAGE_FAILURE
from ensemble.forest import train_forest
from ensemble.serialization import save_forest
from evalmetrics.metrics import compute_metrics
from evalmetrics.report import write_report
from featsel.selector import FeatureSelectionModel, fit_feature_pipeline
from models.region import RegionLabel
from models.schemas import PipelineConfig, load_config, load_phantom_spec
from models.volume import ValueKind
from neural.band import CnnVoxelClassifier, refine_labels
from neural.serialization import load_model
from phantom.generator import generate_phantom
from phantom.suite import make_phantom_spec
from pipeline.orchestrator import run_pipeline
from pipeline.training import TrainingCase, case_regions, train_models
from postproc.morphology import morph_smooth
from postproc.otsu import binarize
from postproc.temporal import temporal_refine
from radiomics.candidates import extract_candidate_regions
from radiomics.extractor import FeatureExtractor
from radiomics.manifest import FeatureManifest
from radiomics.sampler import sample_negative_regions
from radiomics.table import read_feature_table, write_feature_table
from utils.exceptions import ConfigError, StageError, TumorRefineError
from utils.logging_setup import setup_logging
from utils.serialization import write_json
from volumes.io import load_volume, save_volume
from volumes.preprocessing import clip_rescale_hu, resample_isotropic

logger = logging.getLogger(__name__)

# Vaka dizini dosya adları (phantom komutunun yazdığı düzen)
CASE_FILES = {
    "ct": "ct.mha",
    "liver": "liver.mha",
    "tumor": "tumor.mha",
    "p_liver": "p_liver.mha",
    "p_tumor": "p_tumor.mha",
}


# =============================================================================
# YARDIMCILAR
# =============================================================================
def build_config(
    config_path: Optional[Path],
    overrides: Sequence[str],
    **flags,
) -> PipelineConfig:
    """Varsayılanlar < JSON dosyası < --set < özel bayraklar"""
    extra = [f"{key}={value}" for key, value in flags.items() if value is not None]
    return load_config(config_path, list(overrides) + extra)


def read_case_dir(directory: Path) -> TrainingCase:
    directory = Path(directory)
    required = (CASE_FILES["ct"], CASE_FILES["liver"], CASE_FILES["tumor"])
    missing = [name for name in required if not (directory / name).exists()]
    if missing:
        raise ConfigError(f"{directory}: eksik dosyalar: {', '.join(missing)}")
    p_tumor = directory / CASE_FILES["p_tumor"]
    return TrainingCase(
        case_id=directory.name,
        ct=load_volume(directory / CASE_FILES["ct"]),
        liver=load_volume(directory / CASE_FILES["liver"], "mask"),
        tumor=load_volume(directory / CASE_FILES["tumor"], "mask"),
        p_tumor=load_volume(p_tumor, "prob") if p_tumor.exists() else None,
    )


def binary_labels(labels: Optional[List[str]], path: Path) -> np.ndarray:
    if labels is None or RegionLabel.UNKNOWN.value in labels:
        raise ConfigError(f"{path}: etiketli özellik tablosu gerekli")
    return np.array([1 if label == RegionLabel.POSITIVE.value else 0 for label in labels])


config_option = click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path), help="JSON konfigürasyon")
set_option = click.option("--set", "overrides", multiple=True, help="Konfigürasyon override'ı (a.b=değer)")
seed_option = click.option("--seed", type=int, default=None, help="Ana tohum")


# =============================================================================
# KOMUT GRUBU
# =============================================================================
@click.group()
@click.option("--log-level", default=runtime_settings.log_level, show_default=True, help="Log seviyesi")
@click.option("--log-json/--no-log-json", default=runtime_settings.log_json, show_default=True, help="Satır bazlı JSON log (--no-log-json: renkli konsol)")
@click.option("--log-file", type=click.Path(path_type=Path), default=runtime_settings.log_file, help="Log dosyası")
@click.option("--workers", type=int, default=None, help="İşçi sayısı")
def cli(log_level: str, log_json: bool, log_file: Optional[Path], workers: Optional[int]):
    """Karaciğer tümörü segmentasyonu son işleme araçları"""
    setup_logging(log_level.upper(), log_json, log_file)
    if workers is not None:
        runtime_settings.workers = workers


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True, path_type=Path), help="PhantomSpec JSON")
@click.option("--index", type=int, default=0, show_default=True, help="Standart takım indeksi")
@click.option("--noisy/--clean", default=True, help="Bozulmalı olasılık haritaları")
@seed_option
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Çıktı dizini")
def phantom(spec_path: Optional[Path], index: int, noisy: bool, seed: Optional[int], out: Path):
    """Sentetik fantom üret (ct, maskeler, olasılık haritaları)"""
    if spec_path is not None:
        spec = load_phantom_spec(spec_path)
    else:
        spec = make_phantom_spec(index, runtime_seed(seed), noisy)
    result = generate_phantom(spec)
    out.mkdir(parents=True, exist_ok=True)
    for key, name in CASE_FILES.items():
        save_volume(getattr(result, key), out / name)
    save_volume(result.vessels, out / "vessels.mha")
    write_json(spec.model_dump(mode="json"), out / "phantom_spec.json")
    click.echo(f"[OK] Fantom yazıldı: {out}")


def runtime_seed(seed: Optional[int]) -> int:
    return DEFAULT_SEED if seed is None else seed


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--spacing", type=float, default=None, help="İzotropik hedef aralık (mm)")
@click.option("--out", type=click.Path(path_type=Path), required=True)
def preprocess(input_path: Path, spacing: Optional[float], out: Path):
    """HU hacmini pencerele ve 0..255'e ölçekle (opsiyonel yeniden örnekleme)"""
    volume = load_volume(input_path)
    if spacing is not None:
        volume = resample_isotropic(volume, spacing)
    if volume.value_kind is ValueKind.HU_FLOAT:
        volume = clip_rescale_hu(volume)
    save_volume(volume, out)
    click.echo(f"[OK] {out} {volume.dims}")


@cli.command()
@click.option("--prob", "prob_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--mode", type=click.Choice(["otsu", "fixed"]), default=None)
@click.option("--tau", type=int, default=None, help="Sabit eşik (0..254)")
@click.option("--morph/--no-morph", default=None)
@click.option("--temporal/--no-temporal", default=None)
@config_option
@set_option
def postproc(prob_path, out, mode, tau, morph, temporal, config_path, overrides):
    """Eşikleme + morfoloji + kesitler arası iyileştirme"""
    cfg = build_config(
        config_path, overrides,
        **{"postproc.otsu_mode": mode, "postproc.fixed_tau": tau, "toggles.morph": flag(morph), "toggles.temporal": flag(temporal)},
    )
    p = load_volume(prob_path, "prob")
    mask = binarize(p, cfg.postproc.otsu_mode, cfg.postproc.fixed_tau)
    if cfg.toggles.morph:
        mask = morph_smooth(mask)
    if cfg.toggles.temporal:
        mask = temporal_refine(mask, p, cfg.postproc.suppress_isolated, cfg.postproc.restore_threshold)
    save_volume(mask, out)
    click.echo(f"[OK] {out}: {mask.count} ön plan voksel")


def flag(value: Optional[bool]) -> Optional[str]:
    return None if value is None else ("true" if value else "false")


@cli.command()
@click.option("--case", "case_dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Bölge listesi JSON")
@config_option
@set_option
@seed_option
def sample(case_dir, out, config_path, overrides, seed):
    """Karaciğer içinden negatif küre bölgeleri örnekle"""
    cfg = build_config(config_path, overrides, **{"sampler.seed": seed})
    case = read_case_dir(case_dir)
    result = sample_negative_regions(case.ct, case.liver, case.tumor, cfg.sampler, workers=cfg.workers)
    write_json(
        {
            "regions": [
                {"region_id": r.region_id, "radius": r.radius, "size": r.size, "fallback": r.fallback, "bbox": r.bbox}
                for r in result.regions
            ],
            "warnings": result.warnings,
        },
        out,
    )
    click.echo(f"[OK] {len(result.regions)} bölge, {len(result.warnings)} uyarı → {out}")


@cli.command()
@click.option("--case", "case_dir", type=click.Path(exists=True, file_okay=False, path_type=Path), help="Etiketli vaka dizini")
@click.option("--ct", "ct_path", type=click.Path(exists=True, path_type=Path), help="Aday modu: CT hacmi")
@click.option("--mask", "mask_path", type=click.Path(exists=True, path_type=Path), help="Aday modu: eşiklenmiş maske")
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Özellik tablosu CSV")
@config_option
@set_option
@seed_option
def features(case_dir, ct_path, mask_path, out, config_path, overrides, seed):
    """728 boyutlu radyomik özellik tablosu"""
    cfg = build_config(config_path, overrides)
    extractor = FeatureExtractor(band_width=cfg.band_width)
    if case_dir is not None:
        case = read_case_dir(case_dir)
        regions = case_regions(case, cfg, seed if seed is not None else cfg.seed)
        volume = case.normalized()
        labelled = True
    elif ct_path is not None and mask_path is not None:
        volume = load_volume(ct_path)
        if volume.value_kind is ValueKind.HU_FLOAT:
            volume = clip_rescale_hu(volume)
        regions = extract_candidate_regions(load_volume(mask_path, "mask"))
        labelled = False
    else:
        raise ConfigError("--case veya --ct ile --mask birlikte verilmeli")
    vectors = extractor.extract_many(regions, volume, workers=cfg.workers)
    write_feature_table(vectors, FeatureManifest.normative(), out, include_label=labelled)
    click.echo(f"[OK] {len(vectors)} bölge → {out}")


@cli.command()
@click.option("--table", "table_paths", type=click.Path(exists=True, path_type=Path), multiple=True, required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--target", type=int, default=None, help="Hedef özellik sayısı")
@config_option
@set_option
@seed_option
def select(table_paths, out, target, config_path, overrides, seed):
    """Özellik seçimi (NZV, korelasyon, altı sıralama, kararlı alt küme)"""
    cfg = build_config(config_path, overrides, **{"featsel.target": target, "seed": seed})
    X, y, names = stack_tables(table_paths)
    model = fit_feature_pipeline(X, y, cfg.featsel, seed=cfg.seed, feature_names=names, workers=cfg.workers)
    model.save(out)
    click.echo(f"[OK] {len(model.selected)} özellik seçildi → {out}")


def stack_tables(paths: Sequence[Path]):
    blocks, labels, names = [], [], None
    for path in paths:
        _, X, columns, raw = read_feature_table(path, FeatureManifest.normative())
        blocks.append(X)
        labels.append(binary_labels(raw, path))
        names = columns
    return np.vstack(blocks), np.concatenate(labels), names


@cli.command("train-rf")
@click.option("--table", "table_paths", type=click.Path(exists=True, path_type=Path), multiple=True, required=True)
@click.option("--featsel", "featsel_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@config_option
@set_option
@seed_option
def train_rf(table_paths, featsel_path, out, config_path, overrides, seed):
    """Seçili özelliklerle rastgele orman eğit"""
    cfg = build_config(config_path, overrides, **{"seed": seed})
    X, y, _ = stack_tables(table_paths)
    featsel = FeatureSelectionModel.load(featsel_path)
    forest = train_forest(
        featsel.transform(X), y, cfg.forest, seed=cfg.seed, workers=cfg.workers, feature_names=featsel.selected_names,
    )
    save_forest(forest, out)
    click.echo(f"[OK] {cfg.forest.n_trees} ağaç → {out}")


@cli.command("train-cnn")
@click.option("--case", "case_dirs", type=click.Path(exists=True, file_okay=False, path_type=Path), multiple=True, required=True)
@click.option("--val-case", "val_dirs", type=click.Path(exists=True, file_okay=False, path_type=Path), multiple=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True, help="Model dizini")
@click.option("--patch-size", type=int, default=None)
@config_option
@set_option
@seed_option
def train_cnn(case_dirs, val_dirs, out, patch_size, config_path, overrides, seed):
    """Sınır bandı yamaları üzerinde 3D CNN eğit"""
    cfg = build_config(config_path, overrides, **{"cnn.patch_size": patch_size, "seed": seed})
    cfg = cfg.with_toggles(radiomics_filter=False, cnn_refine=True)
    models = train_models(
        [read_case_dir(d) for d in case_dirs], cfg, val_cases=[read_case_dir(d) for d in val_dirs],
    )
    paths = models.save(out)
    click.echo(f"[OK] CNN → {paths['cnn_model']} (en iyi doğrulama kaybı {models.cnn_training.best_val_loss:.4f})")


@cli.command()
@click.option("--ct", "ct_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--mask", "mask_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path), required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
@click.option("--d-max", type=float, default=None)
@config_option
@set_option
def refine(ct_path, mask_path, model_path, out, d_max, config_path, overrides):
    """CNN ile sınır bandı voksellerini yeniden etiketle"""
    cfg = build_config(config_path, overrides, **{"cnn.d_max": d_max})
    volume = load_volume(ct_path)
    if volume.value_kind is ValueKind.HU_FLOAT:
        volume = clip_rescale_hu(volume)
    model = load_model(model_path)
    mask = refine_labels(load_volume(mask_path, "mask"), volume, CnnVoxelClassifier(model), cfg.cnn.d_max)
    save_volume(mask, out)
    click.echo(f"[OK] {out}: {mask.count} ön plan voksel")


@cli.command("eval")
@click.option("--pred", "pred_paths", type=click.Path(exists=True, path_type=Path), multiple=True, required=True)
@click.option("--truth", "truth_paths", type=click.Path(exists=True, path_type=Path), multiple=True, required=True)
@click.option("--out", type=click.Path(path_type=Path), required=True, help="Rapor CSV")
def evaluate(pred_paths, truth_paths, out):
    """Duyarlılık, PPV ve Dice raporu"""
    if len(pred_paths) != len(truth_paths):
        raise ConfigError(f"--pred ({len(pred_paths)}) ve --truth ({len(truth_paths)}) sayıları eşit olmalı")
    rows = [
        compute_metrics(load_volume(p, "mask"), load_volume(t, "mask"), case_id=Path(p).stem)
        for p, t in zip(pred_paths, truth_paths)
    ]
    write_report(rows, out)
    for row in rows:
        click.echo(f"{row.case_id}: Dice={row.dice:.4f} Sens={row.sensitivity:.4f} PPV={row.ppv:.4f}")


@cli.command("pipeline")
@config_option
@set_option
@seed_option
@click.option("--case-id", default="case", show_default=True)
@click.option("--output-dir", type=click.Path(path_type=Path), default=None)
@click.option("--tau-rf", type=float, default=None)
@click.option("--morph/--no-morph", default=None)
@click.option("--temporal/--no-temporal", default=None)
@click.option("--radiomics-filter/--no-radiomics-filter", default=None)
@click.option("--cnn-refine/--no-cnn-refine", default=None)
def pipeline_cmd(config_path, overrides, seed, case_id, output_dir, tau_rf, morph, temporal, radiomics_filter, cnn_refine):
    """Tüm aşamaları tek vaka üzerinde çalıştır"""
    cfg = build_config(
        config_path,
        overrides,
        **{
            "seed": seed,
            "paths.output_dir": output_dir,
            "tau_rf": tau_rf,
            "toggles.morph": flag(morph),
            "toggles.temporal": flag(temporal),
            "toggles.radiomics_filter": flag(radiomics_filter),
            "toggles.cnn_refine": flag(cnn_refine),
        },
    )
    result = run_pipeline(cfg, case_id)
    if result.metrics is not None:
        click.echo(f"[OK] {case_id}: Dice={result.metrics.dice:.4f}")
    else:
        click.echo(f"[OK] {case_id}: {result.mask.count} ön plan voksel")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Ana fonksiyon; hata türünü çıkış koduna çevirir"""
    try:
        cli.main(args=list(argv) if argv is not None else None, standalone_mode=False)
    except ConfigError as e:
        logger.error(f"Konfigürasyon hatası: {e}")
        return EXIT_CONFIG_ERROR
    except StageError as e:
        logger.error(f"Aşama hatası: {e}")
        return EXIT_STAGE_FAILURE
    except click.exceptions.Abort:
        return EXIT_CONFIG_ERROR
    except click.ClickException as e:
        e.show()
        return EXIT_CONFIG_ERROR
    except TumorRefineError as e:
        logger.error(f"Hata: {e}", exc_info=True)
        return EXIT_STAGE_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
