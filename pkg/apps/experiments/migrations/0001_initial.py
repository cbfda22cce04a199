import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationDefaults',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('trials', models.PositiveIntegerField(default=10000, help_text='Число независимых эпизодов для оценки d_1 … d_M, если в спецификации не указано иное.', verbose_name='Эпизодов на рабочую точку')),
                ('retry_cap', models.PositiveIntegerField(default=10, help_text='Сколько раз ретранслятор повторяет блок, если ни один узел не может быть выбран.', verbose_name='Лимит повторных передач')),
                ('window_scale', models.FloatField(default=20.0, help_text='Радиус окна равен этому значению, делённому на √λ.', verbose_name='Масштаб окна моделирования')),
                ('contention_bits', models.PositiveIntegerField(default=10, help_text='Число временных единиц P импульсного выбора ретранслятора.', verbose_name='Разрядность конкурентного выбора')),
                ('integration_samples', models.PositiveIntegerField(default=10000, verbose_name='Выборок на точку интегрирования')),
                ('tail_tolerance', models.FloatField(default=0.001, help_text='Интегрирование прекращается, когда кольцо добавляет меньшую долю накопленной площади.', verbose_name='Допуск хвоста интеграла')),
                ('analytic_throttle_seconds', models.PositiveIntegerField(default=10, help_text='Не чаще одного запроса аналитической таблицы с одного IP за указанное число секунд. 0 - отключить ограничение.', verbose_name='Таймаут аналитического API')),
            ],
            options={
                'verbose_name': 'Параметры моделирования по умолчанию',
            },
        ),
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=255, verbose_name='Название')),
                ('source', models.CharField(help_text='Путь к файлу спецификации или имя набора.', max_length=500, verbose_name='Источник')),
                ('seed', models.PositiveBigIntegerField(verbose_name='Начальное зерно')),
                ('workers', models.PositiveIntegerField(default=1, verbose_name='Процессов')),
                ('trials_scale', models.FloatField(default=1.0, verbose_name='Множитель числа эпизодов')),
                ('status', models.CharField(choices=[('RUNNING', 'Выполняется'), ('FINISHED', 'Завершён'), ('FAILED', 'Ошибка'), ('INTERRUPTED', 'Прерван')], default='RUNNING', max_length=12, verbose_name='Статус')),
                ('output_dir', models.CharField(blank=True, max_length=500, verbose_name='Каталог результатов')),
                ('summary', models.JSONField(blank=True, default=dict, verbose_name='Сводка')),
                ('error', models.TextField(blank=True, verbose_name='Ошибка')),
                ('started_at', models.DateTimeField(auto_now_add=True, db_index=True, verbose_name='Начало')),
                ('finished_at', models.DateTimeField(blank=True, null=True, verbose_name='Окончание')),
            ],
            options={
                'verbose_name': 'Запуск эксперимента',
                'verbose_name_plural': 'Запуски экспериментов',
                'ordering': ['-started_at'],
            },
        ),
        migrations.CreateModel(
            name='Observation',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('experiment', models.CharField(max_length=255, verbose_name='Эксперимент')),
                ('scheme', models.CharField(max_length=3, verbose_name='Схема')),
                ('objective', models.CharField(max_length=10, verbose_name='Целевая функция')),
                ('sweep_axis', models.CharField(max_length=10, verbose_name='Ось развёртки')),
                ('sweep_value', models.FloatField(verbose_name='Значение развёртки')),
                ('metric', models.CharField(max_length=50, verbose_name='Метрика')),
                ('mean', models.FloatField(verbose_name='Среднее')),
                ('std_error', models.FloatField(verbose_name='Стандартная ошибка')),
                ('n', models.PositiveIntegerField(verbose_name='Число испытаний')),
                ('seed', models.PositiveBigIntegerField(verbose_name='Зерно')),
                ('parameters', models.JSONField(default=dict, verbose_name='Параметры')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='observations', to='experiments.experimentrun', verbose_name='Запуск')),
            ],
            options={
                'verbose_name': 'Наблюдение',
                'verbose_name_plural': 'Наблюдения',
                'ordering': ['run', 'experiment', 'scheme', 'objective', 'sweep_value', 'id'],
            },
        ),
    ]
