from django.contrib import admin
from .models import BenchRecord


@admin.register(BenchRecord)
class BenchRecordAdmin(admin.ModelAdmin):
    list_display = ('instance', 'algorithm', 'trials', 'budget', 'recovery_rate', 'dc_mean', 'created_at')
    list_filter = ('algorithm', 'created_at')
    search_fields = ('instance',)
    readonly_fields = ('summary',)
