from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='BenchRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('algorithm', models.CharField(max_length=16)),
                ('instance', models.CharField(max_length=255)),
                ('trials', models.PositiveIntegerField()),
                ('base_seed', models.BigIntegerField()),
                ('budget', models.PositiveIntegerField()),
                ('recovery_rate', models.FloatField()),
                ('dc_mean', models.FloatField(blank=True, null=True)),
                ('dc_std', models.FloatField(blank=True, null=True)),
                ('queries_mean', models.FloatField()),
                ('summary', models.JSONField(default=dict)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
