from django.db import models


class BenchRecord(models.Model):
    created_at = models.DateTimeField(auto_now_add=True)
    algorithm = models.CharField(max_length=16)
    instance = models.CharField(max_length=255)
    trials = models.PositiveIntegerField()
    base_seed = models.BigIntegerField()
    budget = models.PositiveIntegerField()
    recovery_rate = models.FloatField()
    dc_mean = models.FloatField(null=True, blank=True)
    dc_std = models.FloatField(null=True, blank=True)
    queries_mean = models.FloatField()
    summary = models.JSONField(default=dict)

    class Meta:
        ordering = ["-created_at"]

    def __str__(self):
        return f"{self.algorithm} on {self.instance} ({self.trials} trials)"

    @classmethod
    def from_report(cls, report):
        """Build an unsaved record from a BenchReport."""
        dc = report.dc_complexity or {}
        return cls(
            algorithm=report.config.algorithm.value,
            instance=report.instance[:255],
            trials=len(report.records),
            base_seed=report.config.base_seed,
            budget=report.budget,
            recovery_rate=report.recovery_rate,
            dc_mean=dc.get("mean"),
            dc_std=dc.get("std"),
            queries_mean=report.queries_used["mean"],
            summary=report.to_dict(),
        )

    def as_dict(self):
        return {
            "id": self.id,
            "created_at": self.created_at.isoformat() if self.created_at else None,
            "algorithm": self.algorithm,
            "instance": self.instance,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "budget": self.budget,
            "recovery_rate": self.recovery_rate,
            "dc_mean": self.dc_mean,
            "dc_std": self.dc_std,
            "queries_mean": self.queries_mean,
        }
